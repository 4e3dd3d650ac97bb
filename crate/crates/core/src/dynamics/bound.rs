use serde::{Deserialize, Serialize};

use crate::constructions::{FunctionDescriptor, ScheduleEntry};
use crate::error::{LabError, Result};
use crate::montecarlo::{mc_pivotal_count, mc_tribes_stats, Estimate, Provenance, TribeSampler, TribesStatsOptions};
use crate::rng::RandomStream;

use super::volatility::run_trials;
use super::{DynamicsConfig, VolatilityEntry};

/// Largest arity for which the flip-all pivotal estimator is used.
pub const FLIP_ALL_CAP: usize = 1 << 14;

/// Both sides of `P[C = 0] <= ε + exp(−(1 − ε)·a)` with `ε² = P[|𝒫| <= a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub threshold: u64,
    pub p_c0: Estimate,
    /// `P̂[|𝒫| <= a]`.
    pub p_few_pivotal: Estimate,
    pub epsilon: f64,
    /// Right-hand side at the point estimate.
    pub bound: f64,
    /// Right-hand side with `P̂[|𝒫| <= a]` raised by 4 stderr.
    pub bound_upper: f64,
    /// `bound_upper − (P̂[C = 0] − 4·stderr)`; the inequality holds when `>= 0`.
    pub margin: f64,
}

impl BoundVerdict {
    pub fn holds(&self) -> bool {
        self.margin >= 0.0
    }
}

fn rhs(pi: f64, a: u64) -> f64 {
    let eps = pi.clamp(0.0, 1.0).sqrt();
    eps + (-(1.0 - eps) * a as f64).exp()
}

/// Combines the two estimates. The right-hand side increases with
/// `P[|𝒫| <= a]`, so raising that estimate by its slack gives a one-sided
/// upper bound.
pub fn bound_verdict(p_c0: Estimate, p_few_pivotal: Estimate, a: u64) -> BoundVerdict {
    let pi = p_few_pivotal.point;
    let bound = rhs(pi, a);
    let bound_upper = rhs(pi + 4.0 * p_few_pivotal.stderr, a);
    let margin = bound_upper - (p_c0.point - 4.0 * p_c0.stderr);
    BoundVerdict { threshold: a, p_c0, p_few_pivotal, epsilon: pi.clamp(0.0, 1.0).sqrt(), bound, bound_upper, margin }
}

/// `P̂[|𝒫| <= a]` under the stationary law of `cfg`. The bribed majority
/// on a tribes layout uses exact per-sample pivotal counts from the tribe
/// histogram; other families fall back to flip-all for `n <= FLIP_ALL_CAP`.
pub fn pivotal_at_most(family: &FunctionDescriptor, a: u64, p: f64, samples: u64, stream: RandomStream) -> Result<Estimate> {
    if let FunctionDescriptor::Bribed { l, k, base: None } = family {
        let params = crate::constructions::TribesParams::new(*l, *k)?;
        let opts = TribesStatsOptions { thresholds: vec![a], sampler: TribeSampler::Histogram };
        return mc_tribes_stats(params, p, samples, stream, &opts)?.p_pivotal_g_at_most(a);
    }
    let f = family.build()?;
    if f.arity() > FLIP_ALL_CAP {
        return Err(LabError::Unsupported(format!(
            "pivotal counts for {} at n = {} exceed the flip-all cap {FLIP_ALL_CAP}",
            family.family_name(),
            f.arity()
        )));
    }
    let law = mc_pivotal_count(f.as_ref(), p, samples, stream)?;
    let hits: u64 = law.histogram().iter().take(a as usize + 1).sum();
    Ok(Estimate::proportion(hits, samples, Provenance::new(stream, samples)))
}

/// Estimates both sides at one schedule point. Trajectories use lane 0 of
/// `stream`, pivotal counts lane 1; both use `cfg.trials` samples.
pub fn pivotal_bound_check(
    family: &FunctionDescriptor,
    entry: &ScheduleEntry,
    a: u64,
    cfg: &DynamicsConfig,
    stream: RandomStream,
) -> Result<BoundVerdict> {
    cfg.validate()?;
    let d = family.with_layout(entry.params()?);
    let f = d.build()?;
    let lane = stream.lane(0);
    let tally = run_trials(f.as_ref(), cfg, lane)?;
    let vol = VolatilityEntry::from_tally(d.family_name(), Some(entry.k), Some(entry.l), f.arity(), tally, lane);
    let few = pivotal_at_most(&d, a, cfg.p, cfg.trials, stream.lane(1))?;
    Ok(bound_verdict(vol.p_c0, few, a))
}
