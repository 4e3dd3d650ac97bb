use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constructions::{FunctionDescriptor, ScheduleEntry};
use crate::error::Result;
use crate::hypercube::{BooleanFunction, Configuration, Ternary};
use crate::montecarlo::{combined_stderr, run_samples, Estimate, Provenance, Tally};
use crate::rng::RandomStream;

use super::simulate::{assert_consistent, run_trajectory};
use super::{DynamicsConfig, IncrementalSession};

/// Trajectories between release-build consistency checks.
const CONSISTENCY_STRIDE: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChangeTally {
    pub trials: u64,
    /// `C` value -> number of trajectories.
    pub histogram: BTreeMap<u64, u64>,
    pub change_sum: u128,
    pub change_sq_sum: u128,
    pub event_sum: u128,
    pub event_sq_sum: u128,
    /// Output value at time 0 and at the end, by `Ternary::index()`.
    pub initial_values: [u64; 3],
    pub final_values: [u64; 3],
}

impl Tally for ChangeTally {
    fn merge(&mut self, o: Self) {
        self.trials += o.trials;
        for (c, m) in o.histogram {
            *self.histogram.entry(c).or_default() += m;
        }
        self.change_sum += o.change_sum;
        self.change_sq_sum += o.change_sq_sum;
        self.event_sum += o.event_sum;
        self.event_sq_sum += o.event_sq_sum;
        for i in 0..3 {
            self.initial_values[i] += o.initial_values[i];
            self.final_values[i] += o.final_values[i];
        }
    }
}

impl ChangeTally {
    /// Smallest `c` with `P̂[C <= c] >= q`.
    pub fn quantile(&self, q: f64) -> u64 {
        let target = (q * self.trials as f64).ceil().max(1.0) as u64;
        let mut acc = 0;
        for (&c, &m) in &self.histogram {
            acc += m;
            if acc >= target {
                return c;
            }
        }
        self.histogram.keys().next_back().copied().unwrap_or(0)
    }
}

/// `cfg.trials` independent trajectories of `f`; trial `s` uses stream
/// `stream + s`.
pub fn run_trials(f: &dyn BooleanFunction, cfg: &DynamicsConfig, stream: RandomStream) -> Result<ChangeTally> {
    cfg.validate()?;
    let n = f.arity();
    struct Acc<'a> {
        tally: ChangeTally,
        state: Configuration,
        session: Box<dyn IncrementalSession + 'a>,
    }
    impl Tally for Acc<'_> {
        fn merge(&mut self, o: Self) {
            self.tally.merge(o.tally);
        }
    }
    let acc = run_samples(
        cfg.trials,
        stream,
        || Acc { tally: ChangeTally::default(), state: Configuration::all_minus(n), session: f.session() },
        |acc, rng, s| {
            let t = run_trajectory(acc.session.as_mut(), &mut acc.state, cfg, rng);
            if cfg!(debug_assertions) || s % CONSISTENCY_STRIDE == 0 {
                assert_consistent(f, &acc.state, &t);
            }
            let tally = &mut acc.tally;
            tally.trials += 1;
            *tally.histogram.entry(t.changes).or_default() += 1;
            tally.change_sum += t.changes as u128;
            tally.change_sq_sum += (t.changes as u128) * (t.changes as u128);
            tally.event_sum += t.events as u128;
            tally.event_sq_sum += (t.events as u128) * (t.events as u128);
            tally.initial_values[t.initial.index()] += 1;
            tally.final_values[t.last.index()] += 1;
        },
    );
    Ok(acc.tally)
}

/// Volatility statistics for one family member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolatilityEntry {
    pub family: String,
    pub k: Option<u64>,
    pub l: Option<u32>,
    pub n: usize,
    pub p_c0: Estimate,
    pub mean_c: Estimate,
    pub mean_events: Estimate,
    pub q50: u64,
    pub q90: u64,
    pub tally: ChangeTally,
}

impl VolatilityEntry {
    pub fn from_tally(family: &str, k: Option<u64>, l: Option<u32>, n: usize, tally: ChangeTally, stream: RandomStream) -> Self {
        let prov = Provenance::new(stream, tally.trials);
        let zero = tally.histogram.get(&0).copied().unwrap_or(0);
        VolatilityEntry {
            family: family.to_string(),
            k,
            l,
            n,
            p_c0: Estimate::proportion(zero, tally.trials, prov),
            mean_c: Estimate::mean(tally.change_sum, tally.change_sq_sum, tally.trials, prov),
            mean_events: Estimate::mean(tally.event_sum, tally.event_sq_sum, tally.trials, prov),
            q50: tally.quantile(0.5),
            q90: tally.quantile(0.9),
            tally,
        }
    }

    /// Empirical law of `C` as `(c, probability)` pairs.
    pub fn distribution(&self) -> Vec<(u64, f64)> {
        let t = self.tally.trials as f64;
        self.tally.histogram.iter().map(|(&c, &m)| (c, m as f64 / t)).collect()
    }
}

/// One [`VolatilityEntry`] per schedule point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolatilityReport {
    pub config: DynamicsConfig,
    pub entries: Vec<VolatilityEntry>,
}

impl VolatilityReport {
    /// Point estimates of `P[C = 0]` strictly decrease along the schedule.
    pub fn strictly_decreasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].p_c0.point < w[0].p_c0.point)
    }

    /// `(first − last) / combined stderr` of `P̂[C = 0]`.
    pub fn endpoint_separation(&self) -> Option<f64> {
        let (a, b) = (self.entries.first()?, self.entries.last()?);
        let se = combined_stderr(&[&a.p_c0, &b.p_c0]);
        let d = a.p_c0.point - b.p_c0.point;
        Some(if se > 0.0 { d / se } else if d > 0.0 { f64::INFINITY } else { 0.0 })
    }

    pub fn decreasing(&self) -> bool {
        self.strictly_decreasing() && self.endpoint_separation().is_some_and(|s| s > 4.0)
    }
}

/// Sweeps `family` along `entries`; entry `i` uses lane `i` of `stream`.
pub fn volatility_curve(
    family: &FunctionDescriptor,
    entries: &[ScheduleEntry],
    cfg: &DynamicsConfig,
    stream: RandomStream,
) -> Result<VolatilityReport> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let d = family.with_layout(e.params()?);
        let f = d.build()?;
        let lane = stream.lane(i as u64);
        let tally = run_trials(f.as_ref(), cfg, lane)?;
        out.push(VolatilityEntry::from_tally(family.family_name(), Some(e.k), Some(e.l), f.arity(), tally, lane));
    }
    Ok(VolatilityReport { config: *cfg, entries: out })
}

/// Volatility entry for a single function, no schedule attached.
pub fn volatility_of(f: &dyn BooleanFunction, family: &str, cfg: &DynamicsConfig, stream: RandomStream) -> Result<VolatilityEntry> {
    let tally = run_trials(f, cfg, stream)?;
    Ok(VolatilityEntry::from_tally(family, None, None, f.arity(), tally, stream))
}

/// Fraction of trajectories that started (resp. ended) at `v`.
pub fn value_frequencies(t: &ChangeTally, v: Ternary) -> (f64, f64) {
    let n = t.trials as f64;
    (t.initial_values[v.index()] as f64 / n, t.final_values[v.index()] as f64 / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{schedule, Constant, Parity, Rounding};

    #[test]
    fn quantiles() {
        let mut t = ChangeTally::default();
        for (c, m) in [(0u64, 5u64), (1, 3), (4, 2)] {
            t.histogram.insert(c, m);
            t.trials += m;
        }
        assert_eq!(t.quantile(0.5), 0);
        assert_eq!(t.quantile(0.6), 1);
        assert_eq!(t.quantile(0.9), 4);
    }

    #[test]
    fn constant_family_never_moves() {
        let s = schedule(&[16, 32], Rounding::Ceil).unwrap();
        let fam = FunctionDescriptor::Constant { n: 1, value: 1 };
        let r = volatility_curve(&fam, &s, &DynamicsConfig::new(50), RandomStream::new(0, 0)).unwrap();
        for e in &r.entries {
            assert_eq!(e.p_c0.point, 1.0);
            assert_eq!(e.n, (e.k.unwrap() * e.l.unwrap() as u64) as usize);
        }
        assert!(!r.strictly_decreasing());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let f = Parity::new(12);
        let cfg = DynamicsConfig::new(300);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_trials(&f, &cfg, RandomStream::new(7, 0)).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn constant_entry() {
        let f = Constant::new(3, Ternary::Minus);
        let e = volatility_of(&f, "constant", &DynamicsConfig::new(20), RandomStream::new(0, 0)).unwrap();
        assert_eq!(e.distribution(), vec![(0, 1.0)]);
        assert_eq!((e.q50, e.q90), (0, 0));
    }
}
