//! Per-sample tribe statistics for the bribe `f = Tribes(ω) − Tribes(−ω)`
//! and the bribed majority `g`.
//!
//! Everything here is a function of the tribe histogram: how many tribes
//! have exactly `m` coordinates equal to `−1`, for `m = 0..=l`. The
//! histogram comes either from a scan of a sampled configuration or, for
//! large layouts, straight from its multinomial law.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::constructions::{bribable_value, TribesParams};
use crate::error::{check_bias, LabError, Result};
use crate::hypercube::{Configuration, Ternary};
use crate::rng::RandomStream;

use super::parallel::{run_samples, Tally};
use super::{Estimate, Provenance};

/// Tribe counts by number of `−1` coordinates, plus the layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TribeHistogram {
    l: usize,
    by_minus: Vec<u64>,
}

impl TribeHistogram {
    pub fn new(l: usize) -> Self {
        TribeHistogram { l, by_minus: vec![0; l + 1] }
    }

    /// One pass over the tribes of `c`.
    pub fn from_configuration(c: &Configuration, params: TribesParams) -> Self {
        let mut h = Self::new(params.l());
        h.fill_from_configuration(c, params);
        h
    }

    pub fn fill_from_configuration(&mut self, c: &Configuration, params: TribesParams) {
        debug_assert_eq!(self.l, params.l());
        self.by_minus.iter_mut().for_each(|x| *x = 0);
        let l = params.l() as u32;
        for plus in params.plus_counts(c) {
            self.by_minus[(l - plus) as usize] += 1;
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.by_minus
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> u64 {
        self.by_minus.iter().sum()
    }

    /// Coordinate sum `Σ_m c_m·(l − 2m)`.
    pub fn sign_sum(&self) -> i64 {
        let l = self.l as i64;
        self.by_minus.iter().enumerate().map(|(m, &c)| c as i64 * (l - 2 * m as i64)).sum()
    }

    pub fn stats(&self) -> TribesSampleStats {
        TribesSampleStats::from_histogram(self)
    }
}

/// Samples tribe histograms from their multinomial law under `P_p`:
/// each tribe independently has `Binomial(l, 1−p)` coordinates equal to `−1`.
#[derive(Debug, Clone)]
pub struct HistogramSampler {
    l: usize,
    k: u64,
    /// `pmf[m] / Σ_{j≥m} pmf[j]`, the conditional probability of cell `m`
    /// given that a tribe is not in an earlier cell.
    conditional: Vec<f64>,
}

impl HistogramSampler {
    pub fn new(params: TribesParams, p: f64) -> Result<Self> {
        check_bias(p)?;
        let l = params.l();
        let q = 1.0 - p;
        let mut ln_choose = vec![0.0f64; l + 1];
        let mut ln_fact = vec![0.0f64; l + 1];
        for i in 1..=l {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        for m in 0..=l {
            ln_choose[m] = ln_fact[l] - ln_fact[m] - ln_fact[l - m];
        }
        let pmf: Vec<f64> = (0..=l).map(|m| (ln_choose[m] + m as f64 * q.ln() + (l - m) as f64 * p.ln()).exp()).collect();
        let mut tail = vec![0.0; l + 2];
        for m in (0..=l).rev() {
            tail[m] = tail[m + 1] + pmf[m];
        }
        let conditional = (0..=l).map(|m| if tail[m] > 0.0 { (pmf[m] / tail[m]).clamp(0.0, 1.0) } else { 1.0 }).collect();
        Ok(HistogramSampler { l, k: params.k() as u64, conditional })
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, h: &mut TribeHistogram, rng: &mut R) {
        debug_assert_eq!(h.l, self.l);
        let mut remaining = self.k;
        for m in 0..self.l {
            let c = if remaining == 0 {
                0
            } else {
                let q = self.conditional[m];
                if q >= 1.0 {
                    remaining
                } else if q <= 0.0 {
                    0
                } else {
                    Binomial::new(remaining, q).expect("valid binomial").sample(rng)
                }
            };
            h.by_minus[m] = c;
            remaining -= c;
        }
        h.by_minus[self.l] = remaining;
    }
}

/// Everything recorded about one sample ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TribesSampleStats {
    /// `Tribes(ω)`: some tribe is all `+1`.
    pub t_plus: bool,
    /// `Tribes(−ω)`: some tribe is all `−1`.
    pub t_minus: bool,
    /// Tribes with exactly one `−1` (one flip from full `+1`).
    pub up: u64,
    /// Tribes with exactly one `+1` (one flip from full `−1`).
    pub down: u64,
    pub full_plus: u64,
    pub full_minus: u64,
    pub sign_sum: i64,
    /// Majority with ties to `+1`.
    pub maj: Ternary,
    /// `f = Tribes(ω) − Tribes(−ω)`.
    pub f: Ternary,
    /// `g = maj` where `f = 0`, else `f`.
    pub g: Ternary,
    /// `|𝒫(f)|`, exact.
    pub pivotal_f: u64,
    /// `|𝒫(g)|`, exact.
    pub pivotal_g: u64,
}

#[inline]
fn g_of(f: Ternary, sum: i64) -> Ternary {
    if f == Ternary::Zero {
        Ternary::from_bool(sum >= 0)
    } else {
        f
    }
}

impl TribesSampleStats {
    pub fn from_histogram(h: &TribeHistogram) -> Self {
        let l = h.l;
        let c = &h.by_minus;
        let full_plus = c[0];
        let full_minus = c[l];
        let sum = h.sign_sum();
        let f = bribable_value(full_plus > 0, full_minus > 0);
        let g = g_of(f, sum);

        // A flip changes only its own tribe's count and moves the sum by ±2,
        // so pivotality depends on (m, direction) alone.
        let mut pivotal_f = 0u64;
        let mut pivotal_g = 0u64;
        let mut account = |cells: u64, fp: u64, fm: u64, new_sum: i64| {
            let f2 = bribable_value(fp > 0, fm > 0);
            if f2 != f {
                pivotal_f += cells;
            }
            if g_of(f2, new_sum) != g {
                pivotal_g += cells;
            }
        };
        for (m, &tribes) in c.iter().enumerate() {
            if tribes == 0 {
                continue;
            }
            let plus_bits = (l - m) as u64;
            let minus_bits = m as u64;
            if plus_bits > 0 {
                // +1 -> -1: m grows by one.
                let fp = full_plus - (m == 0) as u64;
                let fm = full_minus + (m + 1 == l) as u64;
                account(tribes * plus_bits, fp, fm, sum - 2);
            }
            if minus_bits > 0 {
                // -1 -> +1: m shrinks by one.
                let fp = full_plus + (m == 1) as u64;
                let fm = full_minus - (m == l) as u64;
                account(tribes * minus_bits, fp, fm, sum + 2);
            }
        }

        TribesSampleStats {
            t_plus: full_plus > 0,
            t_minus: full_minus > 0,
            up: c[1.min(l)],
            down: c[l - 1],
            full_plus,
            full_minus,
            sign_sum: sum,
            maj: Ternary::from_bool(sum >= 0),
            f,
            g,
            pivotal_f,
            pivotal_g,
        }
    }

    /// `f = 0` with tribes one flip away from both `+1` and `−1`.
    pub fn witness(&self) -> bool {
        self.f == Ternary::Zero && self.up > 0 && self.down > 0
    }

    pub fn neither_full(&self) -> bool {
        !self.t_plus && !self.t_minus
    }
}

/// How histograms are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TribeSampler {
    /// Sample every coordinate, then scan the tribes. `O(n)` per sample.
    #[default]
    Scan,
    /// Draw the histogram from its multinomial law. `O(l)` per sample.
    Histogram,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TribesStatsOptions {
    /// Thresholds `a` for the tails `P[U > a]` and `P[|𝒫(g)| > a]`.
    pub thresholds: Vec<u64>,
    pub sampler: TribeSampler,
}

/// Integer tallies over a run of samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TribesTally {
    pub n: u64,
    /// Indexed by `Ternary::index()`.
    pub f_counts: [u64; 3],
    pub witness: u64,
    pub neither_full: u64,
    pub up_sum: u128,
    pub up_sq_sum: u128,
    pub down_sum: u128,
    pub down_sq_sum: u128,
    pub pivotal_g_sum: u128,
    pub pivotal_g_sq_sum: u128,
    /// `up_exceeds[i]` counts samples with `U > thresholds[i]`.
    pub up_exceeds: Vec<u64>,
    /// `pivotal_g_exceeds[i]` counts samples with `|𝒫(g)| > thresholds[i]`.
    pub pivotal_g_exceeds: Vec<u64>,
    /// `crosstab[f.index()][maj is +1]`.
    pub crosstab: [[u64; 2]; 3],
}

impl TribesTally {
    fn new(thresholds: usize) -> Self {
        TribesTally {
            n: 0,
            f_counts: [0; 3],
            witness: 0,
            neither_full: 0,
            up_sum: 0,
            up_sq_sum: 0,
            down_sum: 0,
            down_sq_sum: 0,
            pivotal_g_sum: 0,
            pivotal_g_sq_sum: 0,
            up_exceeds: vec![0; thresholds],
            pivotal_g_exceeds: vec![0; thresholds],
            crosstab: [[0; 2]; 3],
        }
    }

    fn record(&mut self, s: &TribesSampleStats, thresholds: &[u64]) {
        self.n += 1;
        self.f_counts[s.f.index()] += 1;
        self.witness += s.witness() as u64;
        self.neither_full += s.neither_full() as u64;
        self.up_sum += s.up as u128;
        self.up_sq_sum += (s.up as u128) * (s.up as u128);
        self.down_sum += s.down as u128;
        self.down_sq_sum += (s.down as u128) * (s.down as u128);
        self.pivotal_g_sum += s.pivotal_g as u128;
        self.pivotal_g_sq_sum += (s.pivotal_g as u128) * (s.pivotal_g as u128);
        for (i, &a) in thresholds.iter().enumerate() {
            self.up_exceeds[i] += (s.up > a) as u64;
            self.pivotal_g_exceeds[i] += (s.pivotal_g > a) as u64;
        }
        self.crosstab[s.f.index()][(s.maj == Ternary::Plus) as usize] += 1;
    }
}

impl Tally for TribesTally {
    fn merge(&mut self, o: Self) {
        self.n += o.n;
        for i in 0..3 {
            self.f_counts[i] += o.f_counts[i];
            for j in 0..2 {
                self.crosstab[i][j] += o.crosstab[i][j];
            }
        }
        self.witness += o.witness;
        self.neither_full += o.neither_full;
        self.up_sum += o.up_sum;
        self.up_sq_sum += o.up_sq_sum;
        self.down_sum += o.down_sum;
        self.down_sq_sum += o.down_sq_sum;
        self.pivotal_g_sum += o.pivotal_g_sum;
        self.pivotal_g_sq_sum += o.pivotal_g_sq_sum;
        for (a, b) in self.up_exceeds.iter_mut().zip(o.up_exceeds) {
            *a += b;
        }
        for (a, b) in self.pivotal_g_exceeds.iter_mut().zip(o.pivotal_g_exceeds) {
            *a += b;
        }
    }
}

/// Aggregated tribe statistics with estimates derived from the tallies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TribesStatsReport {
    pub l: usize,
    pub k: usize,
    pub p: f64,
    pub sampler: TribeSampler,
    pub thresholds: Vec<u64>,
    pub provenance: Provenance,
    pub tally: TribesTally,
}

impl TribesStatsReport {
    fn proportion(&self, hits: u64) -> Estimate {
        Estimate::proportion(hits, self.tally.n, self.provenance)
    }

    pub fn p_f(&self, v: Ternary) -> Estimate {
        self.proportion(self.tally.f_counts[v.index()])
    }

    pub fn p_f_zero(&self) -> Estimate {
        self.p_f(Ternary::Zero)
    }

    /// `P[f = 0 ∧ U > 0 ∧ D > 0]`.
    pub fn p_witness(&self) -> Estimate {
        self.proportion(self.tally.witness)
    }

    pub fn p_neither_full(&self) -> Estimate {
        self.proportion(self.tally.neither_full)
    }

    /// Mean number of up-pivotal tribes.
    pub fn mean_up(&self) -> Estimate {
        Estimate::mean(self.tally.up_sum, self.tally.up_sq_sum, self.tally.n, self.provenance)
    }

    pub fn mean_down(&self) -> Estimate {
        Estimate::mean(self.tally.down_sum, self.tally.down_sq_sum, self.tally.n, self.provenance)
    }

    pub fn mean_pivotal_g(&self) -> Estimate {
        Estimate::mean(self.tally.pivotal_g_sum, self.tally.pivotal_g_sq_sum, self.tally.n, self.provenance)
    }

    fn threshold_index(&self, a: u64) -> Result<usize> {
        self.thresholds
            .iter()
            .position(|&t| t == a)
            .ok_or_else(|| LabError::InvalidParameter(format!("threshold {a} was not requested")))
    }

    /// `P[U > a]` for a requested threshold.
    pub fn p_up_exceeds(&self, a: u64) -> Result<Estimate> {
        Ok(self.proportion(self.tally.up_exceeds[self.threshold_index(a)?]))
    }

    /// `P[|𝒫(g)| > a]` for a requested threshold.
    pub fn p_pivotal_g_exceeds(&self, a: u64) -> Result<Estimate> {
        Ok(self.proportion(self.tally.pivotal_g_exceeds[self.threshold_index(a)?]))
    }

    /// `P[|𝒫(g)| <= a]` for a requested threshold.
    pub fn p_pivotal_g_at_most(&self, a: u64) -> Result<Estimate> {
        let i = self.threshold_index(a)?;
        Ok(self.proportion(self.tally.n - self.tally.pivotal_g_exceeds[i]))
    }

    /// Per-tribe probability of being one flip from full `+1`: `l(1−p)p^{l−1}`;
    /// times `k` this is the expected `U`.
    pub fn expected_up(&self) -> f64 {
        let l = self.l as f64;
        self.k as f64 * l * (1.0 - self.p) * self.p.powf(l - 1.0)
    }
}

/// One O(n) scan or O(l) histogram draw per sample, aggregated.
pub fn mc_tribes_stats(
    params: TribesParams,
    p: f64,
    n_samples: u64,
    stream: RandomStream,
    options: &TribesStatsOptions,
) -> Result<TribesStatsReport> {
    check_bias(p)?;
    if n_samples == 0 {
        return Err(LabError::InvalidParameter("n_samples must be positive".into()));
    }
    let thresholds = options.thresholds.clone();
    let tally = match options.sampler {
        TribeSampler::Scan => {
            struct Acc {
                tally: TribesTally,
                omega: Configuration,
                hist: TribeHistogram,
            }
            impl Tally for Acc {
                fn merge(&mut self, o: Self) {
                    self.tally.merge(o.tally);
                }
            }
            run_samples(
                n_samples,
                stream,
                || Acc {
                    tally: TribesTally::new(thresholds.len()),
                    omega: Configuration::all_minus(params.n()),
                    hist: TribeHistogram::new(params.l()),
                },
                |acc, rng, _| {
                    acc.omega.fill_random(p, rng);
                    acc.hist.fill_from_configuration(&acc.omega, params);
                    acc.tally.record(&acc.hist.stats(), &thresholds);
                },
            )
            .tally
        }
        TribeSampler::Histogram => {
            let sampler = HistogramSampler::new(params, p)?;
            struct Acc {
                tally: TribesTally,
                hist: TribeHistogram,
            }
            impl Tally for Acc {
                fn merge(&mut self, o: Self) {
                    self.tally.merge(o.tally);
                }
            }
            run_samples(
                n_samples,
                stream,
                || Acc { tally: TribesTally::new(thresholds.len()), hist: TribeHistogram::new(params.l()) },
                |acc, rng, _| {
                    sampler.sample_into(&mut acc.hist, rng);
                    acc.tally.record(&acc.hist.stats(), &thresholds);
                },
            )
            .tally
        }
    };
    Ok(TribesStatsReport {
        l: params.l(),
        k: params.k(),
        p,
        sampler: options.sampler,
        thresholds,
        provenance: Provenance::new(stream, n_samples),
        tally,
    })
}
