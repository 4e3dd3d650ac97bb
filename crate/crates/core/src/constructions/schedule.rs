use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

use super::TribesParams;

/// How the real-valued tribe size `log₂k + ½·log₂log₂k` becomes an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    #[default]
    Ceil,
    Round,
}

/// One point of the parameter schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub index: usize,
    pub k: u64,
    pub l: u32,
    /// `(1 − 2^{−l})^k = P[Tribes = 0]`.
    pub q0: f64,
    /// `k·l·2^{−l}`, the mean number of tribes one flip away from full.
    pub mu: f64,
    /// `log₂k − l`; should drift to `−∞`.
    pub gap_full: f64,
    /// `log₂k + log₂l − l`; should drift to `+∞`.
    pub gap_pivotal: f64,
    /// `q0` failed to increase relative to the previous entry.
    pub q0_flag: bool,
    /// `mu` failed to increase relative to the previous entry.
    pub mu_flag: bool,
}

impl ScheduleEntry {
    pub fn params(&self) -> Result<TribesParams> {
        let k = usize::try_from(self.k).map_err(|_| LabError::InvalidParameter(format!("k = {} too large", self.k)))?;
        TribesParams::new(self.l as usize, k)
    }

    pub fn threshold(&self, rule: ThresholdRule) -> u64 {
        pivotal_threshold(self.mu, rule)
    }

    pub fn flagged(&self) -> bool {
        self.q0_flag || self.mu_flag
    }
}

/// Tribe size for `k` tribes: `log₂k + ½·log₂log₂k`, rounded.
pub fn schedule_l(k: u64, rounding: Rounding) -> Result<u32> {
    if k < 4 {
        return Err(LabError::InvalidParameter(format!("schedule needs k >= 4 so that log log k > 0, got {k}")));
    }
    let lk = (k as f64).log2();
    let raw = lk + 0.5 * lk.log2();
    Ok(match rounding {
        Rounding::Ceil => raw.ceil(),
        Rounding::Round => raw.round(),
    } as u32)
}

/// `(1 − 2^{−l})^k`, accurate for large `l`.
pub fn tribes_zero_probability(l: u32, k: u64) -> f64 {
    (k as f64 * (-(2f64.powi(-(l as i32)))).ln_1p()).exp()
}

pub fn schedule(k_values: &[u64], rounding: Rounding) -> Result<Vec<ScheduleEntry>> {
    let mut out: Vec<ScheduleEntry> = Vec::with_capacity(k_values.len());
    for (index, &k) in k_values.iter().enumerate() {
        let l = schedule_l(k, rounding)?;
        let q0 = tribes_zero_probability(l, k);
        let mu = k as f64 * l as f64 * 2f64.powi(-(l as i32));
        let lk = (k as f64).log2();
        let (q0_flag, mu_flag) = match out.last() {
            Some(prev) => (q0 <= prev.q0, mu <= prev.mu),
            None => (false, false),
        };
        out.push(ScheduleEntry {
            index,
            k,
            l,
            q0,
            mu,
            gap_full: lk - l as f64,
            gap_pivotal: lk + (l as f64).log2() - l as f64,
            q0_flag,
            mu_flag,
        });
    }
    Ok(out)
}

/// `k = 2^j` for `j` in `range`.
pub fn doubling_k(range: std::ops::RangeInclusive<u32>) -> Vec<u64> {
    range.map(|j| 1u64 << j).collect()
}

/// How to turn the pivotal mean into a concrete threshold `a_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule", content = "value")]
pub enum ThresholdRule {
    #[default]
    HalfMean,
    SqrtMean,
    Explicit(u64),
}

/// `a_n`: `max(1, ⌊μ/2⌋)` or `max(1, ⌊√μ⌋)`; explicit values pass through.
pub fn pivotal_threshold(mu: f64, rule: ThresholdRule) -> u64 {
    match rule {
        ThresholdRule::HalfMean => ((mu / 2.0).floor() as u64).max(1),
        ThresholdRule::SqrtMean => (mu.sqrt().floor() as u64).max(1),
        ThresholdRule::Explicit(a) => a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn k_1024() {
        let e = &schedule(&[1024], Rounding::Ceil).unwrap()[0];
        assert_eq!(e.l, 12);
        assert_relative_eq!(e.mu, 3.0);
        assert_relative_eq!(e.q0, 0.7788, epsilon = 1e-4);
        assert_eq!(e.threshold(ThresholdRule::HalfMean), 1);
    }

    #[test]
    fn k_2_pow_20() {
        let e = &schedule(&[1 << 20], Rounding::Ceil).unwrap()[0];
        assert_eq!(e.l, 23);
        assert_relative_eq!(e.mu, 2.875);
    }

    #[test]
    fn small_k_rejected() {
        assert!(schedule(&[3], Rounding::Ceil).is_err());
        assert!(schedule_l(4, Rounding::Ceil).is_ok());
    }

    #[test]
    fn thresholds() {
        assert_eq!(pivotal_threshold(3.0, ThresholdRule::HalfMean), 1);
        assert_eq!(pivotal_threshold(9.0, ThresholdRule::SqrtMean), 3);
        assert_eq!(pivotal_threshold(0.5, ThresholdRule::SqrtMean), 1);
        assert_eq!(pivotal_threshold(9.0, ThresholdRule::Explicit(0)), 0);
    }

    // Exact binomial tail by summing the pmf in log space.
    fn binomial_upper_tail(n: u64, q: f64, a: u64) -> f64 {
        let mut ln_fact = vec![0.0f64; n as usize + 1];
        for i in 1..=n as usize {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        ((a + 1)..=n)
            .map(|x| {
                let lc = ln_fact[n as usize] - ln_fact[x as usize] - ln_fact[(n - x) as usize];
                (lc + x as f64 * q.ln() + (n - x) as f64 * (1.0 - q).ln()).exp()
            })
            .sum()
    }

    #[test]
    fn half_mean_threshold_is_exceeded_with_high_probability() {
        // k = 48 tribes of size 4: per-tribe probability 4/16, mean 12.
        let (k, l) = (48u64, 4u32);
        let q = l as f64 / 16.0;
        let mu = k as f64 * q;
        assert_relative_eq!(mu, 12.0);
        let a = pivotal_threshold(mu, ThresholdRule::HalfMean);
        assert_eq!(a, 6);
        let tail = binomial_upper_tail(k, q, a);
        assert!(tail > 0.95, "tail {tail}");
    }

    #[test]
    fn q0_increases_along_doubling_k() {
        for rounding in [Rounding::Ceil, Rounding::Round] {
            let s = schedule(&doubling_k(8..=24), rounding).unwrap();
            assert!(s.iter().all(|e| !e.q0_flag), "{rounding:?}");
            assert!(s.iter().all(|e| e.q0 > 0.0 && e.q0 < 1.0 && e.mu > 0.0));
        }
    }

    #[test]
    fn mu_increases_along_doubling_k_when_rounded() {
        let s = schedule(&doubling_k(8..=24), Rounding::Round).unwrap();
        assert!(s.iter().all(|e| !e.mu_flag));
        assert!(s.windows(2).all(|w| w[1].gap_pivotal > w[0].gap_pivotal));
    }

    #[test]
    fn ceil_schedule_flags_the_mu_drop() {
        // At k = 2^17 the ceiling jumps two units (19.04 -> 20) and mu falls
        // from 4.5 to 2.5; the diagnostics must say so.
        let s = schedule(&doubling_k(8..=24), Rounding::Ceil).unwrap();
        let flagged: Vec<u64> = s.iter().filter(|e| e.mu_flag).map(|e| e.k).collect();
        assert_eq!(flagged, vec![1 << 17]);
        assert_relative_eq!(s[8].mu, 4.5);
        assert_relative_eq!(s[9].mu, 2.5);
        // Within each band where l - log₂k is constant, mu still increases.
        for w in s.windows(2) {
            if w[0].gap_full == w[1].gap_full {
                assert!(w[1].mu > w[0].mu);
            }
        }
    }

    #[test]
    fn threshold_nondecreasing_in_mu() {
        let s = schedule(&doubling_k(8..=24), Rounding::Round).unwrap();
        for rule in [ThresholdRule::HalfMean, ThresholdRule::SqrtMean] {
            assert!(s.windows(2).all(|w| w[1].threshold(rule) >= w[0].threshold(rule)));
        }
    }
}
