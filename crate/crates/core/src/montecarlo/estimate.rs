use serde::{Deserialize, Serialize};

use crate::rng::RandomStream;

/// 97.5% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Which streams produced an estimate: `seed` with streams
/// `[stream_start, stream_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream_start: u64,
    pub stream_end: u64,
}

impl Provenance {
    pub fn new(base: RandomStream, n_samples: u64) -> Self {
        Provenance { seed: base.seed, stream_start: base.stream, stream_end: base.stream.wrapping_add(n_samples) }
    }
}

/// A Monte Carlo point estimate with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub point: f64,
    pub n_samples: u64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub provenance: Provenance,
}

impl Estimate {
    /// Binomial tally: `stderr = sqrt(p̂(1−p̂)/n)`, 95% Wilson interval.
    pub fn proportion(successes: u64, n_samples: u64, provenance: Provenance) -> Self {
        assert!(n_samples > 0 && successes <= n_samples);
        let n = n_samples as f64;
        let point = successes as f64 / n;
        let stderr = (point * (1.0 - point) / n).sqrt();
        let (lo, hi) = wilson(point, n, Z95);
        // At 0 and 1 the interval endpoint equals the point up to rounding.
        let (ci_lo, ci_hi) = (lo.min(point), hi.max(point));
        Estimate { point, n_samples, stderr, ci_lo, ci_hi, provenance }
    }

    /// Sample mean from integer sums, with a normal 95% interval.
    pub fn mean(sum: u128, sum_sq: u128, n_samples: u64, provenance: Provenance) -> Self {
        assert!(n_samples > 0);
        let n = n_samples as f64;
        let point = sum as f64 / n;
        let var = if n_samples > 1 { ((sum_sq as f64 - n * point * point) / (n - 1.0)).max(0.0) } else { 0.0 };
        let stderr = (var / n).sqrt();
        Estimate { point, n_samples, stderr, ci_lo: point - Z95 * stderr, ci_hi: point + Z95 * stderr, provenance }
    }

    pub fn ci95(&self) -> (f64, f64) {
        (self.ci_lo, self.ci_hi)
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci_lo <= value && value <= self.ci_hi
    }

    /// `|point − value| <= k·stderr`. A zero stderr demands exact agreement.
    pub fn within_sigmas(&self, value: f64, k: f64) -> bool {
        (self.point - value).abs() <= k * self.stderr
    }
}

/// Wilson score interval for a proportion.
pub fn wilson(point: f64, n: f64, z: f64) -> (f64, f64) {
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (point + z2 / (2.0 * n)) / denom;
    let half = z * (point * (1.0 - point) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// `sqrt(Σ se²)`, the stderr of a sum or difference of independent estimates.
pub fn combined_stderr(estimates: &[&Estimate]) -> f64 {
    estimates.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt()
}
