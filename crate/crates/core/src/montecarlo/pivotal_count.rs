use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{check_bias, LabError, Result};
use crate::hypercube::{BooleanFunction, Configuration, Ternary};
use crate::rng::RandomStream;

use super::parallel::{run_samples, Tally};
use super::Provenance;

/// Empirical joint law of `(f(ω), |𝒫(ω)|)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotalCountLaw {
    pub n: usize,
    pub n_samples: u64,
    /// `joint[m][v.index()]`: samples with `|𝒫| = m` and value `v`.
    pub joint: Vec<[u64; 3]>,
    pub provenance: Provenance,
}

impl PivotalCountLaw {
    pub fn count(&self, v: Ternary, m: usize) -> u64 {
        self.joint.get(m).map_or(0, |row| row[v.index()])
    }

    pub fn value_count(&self, v: Ternary) -> u64 {
        self.joint.iter().map(|row| row[v.index()]).sum()
    }

    /// Histogram of `|𝒫|` over all samples.
    pub fn histogram(&self) -> Vec<u64> {
        self.joint.iter().map(|row| row.iter().sum()).collect()
    }

    /// Histogram of `|𝒫|` restricted to samples with value `v`.
    pub fn conditional_histogram(&self, v: Ternary) -> Vec<u64> {
        self.joint.iter().map(|row| row[v.index()]).collect()
    }

    pub fn mean(&self) -> f64 {
        let s: u64 = self.histogram().iter().enumerate().map(|(m, &c)| m as u64 * c).sum();
        s as f64 / self.n_samples as f64
    }
}

struct LawTally {
    joint: Vec<[u64; 3]>,
    work: Configuration,
}

impl Tally for LawTally {
    fn merge(&mut self, other: Self) {
        for (a, b) in self.joint.iter_mut().zip(other.joint) {
            for i in 0..3 {
                a[i] += b[i];
            }
        }
    }
}

/// Flip-all estimator of the law of `|𝒫(f)|` under `P_p`: `n + 1`
/// evaluations per sample.
pub fn mc_pivotal_count(f: &dyn BooleanFunction, p: f64, n_samples: u64, stream: RandomStream) -> Result<PivotalCountLaw> {
    check_bias(p)?;
    if n_samples == 0 {
        return Err(LabError::InvalidParameter("n_samples must be positive".into()));
    }
    let n = f.arity();
    let tally = run_samples(
        n_samples,
        stream,
        || LawTally { joint: vec![[0; 3]; n + 1], work: Configuration::all_minus(n) },
        |acc, rng, _| {
            acc.work.fill_random(p, rng);
            let v = f.eval(&acc.work);
            let mut m = 0;
            for i in 0..n {
                acc.work.toggle(i);
                m += (f.eval(&acc.work) != v) as usize;
                acc.work.toggle(i);
            }
            acc.joint[m][v.index()] += 1;
        },
    );
    Ok(PivotalCountLaw { n, n_samples, joint: tally.joint, provenance: Provenance::new(stream, n_samples) })
}

/// Pearson goodness of fit of `observed` against `expected` probabilities.
///
/// Cells with expected count below 5 are pooled into one; returns the
/// statistic and its degrees of freedom.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<(f64, usize)> {
    if observed.len() != expected.len() {
        return Err(LabError::InvalidParameter("observed and expected lengths differ".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(LabError::InvalidParameter("no observations".into()));
    }
    let mass: f64 = expected.iter().sum();
    if !(mass > 0.0) {
        return Err(LabError::InvalidParameter("expected law has no mass".into()));
    }
    let nt = total as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        let e = e / mass * nt;
        if e < 5.0 {
            pooled_obs += o as f64;
            pooled_exp += e;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    } else if pooled_obs > 0.0 {
        return Ok((f64::INFINITY, cells.max(1)));
    }
    Ok((stat, cells.saturating_sub(1).max(1)))
}

/// Upper `alpha` quantile of the chi-square law with `dof` degrees of freedom.
pub fn chi_square_critical(dof: usize, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64).expect("positive degrees of freedom").inverse_cdf(1.0 - alpha)
}

/// Upper tail probability of `stat`.
pub fn chi_square_p_value(stat: f64, dof: usize) -> f64 {
    ChiSquared::new(dof as f64).expect("positive degrees of freedom").sf(stat)
}
