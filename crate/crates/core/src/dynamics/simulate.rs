use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{check_bias, LabError, Result};
use crate::hypercube::{BooleanFunction, Configuration, Ternary};
use crate::rng::{RandomStream, StreamRng};

use super::IncrementalSession;

/// What a clock ring does to its coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// Reverse the sign. Stationary for the uniform measure only.
    #[default]
    Flip,
    /// Redraw the sign, `+1` with probability `p`.
    Resample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default)]
    pub semantics: Semantics,
    #[serde(default = "default_p")]
    pub p: f64,
    pub trials: u64,
}

fn default_duration() -> f64 {
    1.0
}

fn default_p() -> f64 {
    0.5
}

impl DynamicsConfig {
    pub fn new(trials: u64) -> Self {
        DynamicsConfig { duration: 1.0, semantics: Semantics::Flip, p: 0.5, trials }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(LabError::InvalidParameter(format!("duration must be positive, got {}", self.duration)));
        }
        check_bias(self.p)?;
        if self.semantics == Semantics::Flip && self.p != 0.5 {
            return Err(LabError::InvalidParameter(format!(
                "flip semantics preserves only the uniform measure; p = {} needs resample semantics",
                self.p
            )));
        }
        if self.trials == 0 {
            return Err(LabError::InvalidParameter("trials must be positive".into()));
        }
        Ok(())
    }
}

/// Result of one trajectory on `[0, duration]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Clock rings, `N ~ Poisson(n·duration)`.
    pub events: u64,
    /// Output changes `C`.
    pub changes: u64,
    pub initial: Ternary,
    pub last: Ternary,
}

/// Runs one trajectory. `state` is overwritten with a stationary draw and
/// holds the final configuration on return.
pub(crate) fn run_trajectory(
    session: &mut dyn IncrementalSession,
    state: &mut Configuration,
    cfg: &DynamicsConfig,
    rng: &mut StreamRng,
) -> Trajectory {
    let n = state.len();
    state.fill_random(cfg.p, rng);
    let initial = session.load(state);
    let lambda = n as f64 * cfg.duration;
    let events = if lambda > 0.0 { Poisson::new(lambda).expect("positive rate").sample(rng) as u64 } else { 0 };
    let mut current = initial;
    let mut changes = 0u64;
    match cfg.semantics {
        Semantics::Flip => {
            for _ in 0..events {
                let i = rng.random_range(0..n);
                let now = state.toggle(i);
                let v = session.toggle(i, now);
                changes += (v != current) as u64;
                current = v;
            }
        }
        Semantics::Resample => {
            for _ in 0..events {
                let i = rng.random_range(0..n);
                let plus = rng.random_bool(cfg.p);
                if plus != state.is_plus(i) {
                    state.set(i, plus);
                    let v = session.toggle(i, plus);
                    changes += (v != current) as u64;
                    current = v;
                }
            }
        }
    }
    Trajectory { events, changes, initial, last: current }
}

/// Re-evaluates from scratch and panics if the session has drifted.
pub(crate) fn assert_consistent(f: &dyn BooleanFunction, state: &Configuration, t: &Trajectory) {
    let fresh = f.eval(state);
    assert_eq!(fresh, t.last, "incremental session disagrees with fresh evaluation");
}

/// One trajectory of `f` on its own stream.
pub fn simulate_trajectory(f: &dyn BooleanFunction, cfg: &DynamicsConfig, stream: RandomStream) -> Result<Trajectory> {
    cfg.validate()?;
    let mut state = Configuration::all_minus(f.arity());
    let mut session = f.session();
    let t = run_trajectory(session.as_mut(), &mut state, cfg, &mut stream.rng());
    assert_consistent(f, &state, &t);
    Ok(t)
}

/// A trajectory with materialized event times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedTrajectory {
    pub initial: Ternary,
    /// `(time, new value)` for every output change, in time order.
    pub switches: Vec<(f64, Ternary)>,
    pub events: u64,
}

impl TimedTrajectory {
    /// Output changes inside `[from, to)`.
    pub fn changes_in(&self, from: f64, to: f64) -> usize {
        self.switches.iter().filter(|(t, _)| *t >= from && *t < to).count()
    }

    pub fn value_at(&self, time: f64) -> Ternary {
        self.switches.iter().take_while(|(t, _)| *t <= time).last().map_or(self.initial, |&(_, v)| v)
    }
}

/// Like [`simulate_trajectory`] but keeps event times: given `N`, the times
/// are sorted uniform draws on `[0, duration]`.
pub fn simulate_timed(f: &dyn BooleanFunction, cfg: &DynamicsConfig, stream: RandomStream) -> Result<TimedTrajectory> {
    cfg.validate()?;
    let n = f.arity();
    let mut rng = stream.rng();
    let mut state = Configuration::all_minus(n);
    state.fill_random(cfg.p, &mut rng);
    let mut session = f.session();
    let initial = session.load(&state);
    let events = Poisson::new(n as f64 * cfg.duration).expect("positive rate").sample(&mut rng) as u64;
    let mut times: Vec<f64> = (0..events).map(|_| rng.random::<f64>() * cfg.duration).collect();
    times.sort_by(f64::total_cmp);
    let mut current = initial;
    let mut switches = Vec::new();
    for t in times {
        let i = rng.random_range(0..n);
        let plus = match cfg.semantics {
            Semantics::Flip => !state.is_plus(i),
            Semantics::Resample => rng.random_bool(cfg.p),
        };
        if plus == state.is_plus(i) {
            continue;
        }
        state.set(i, plus);
        let v = session.toggle(i, plus);
        if v != current {
            switches.push((t, v));
            current = v;
        }
    }
    assert_eq!(f.eval(&state), current, "incremental session disagrees with fresh evaluation");
    Ok(TimedTrajectory { initial, switches, events })
}
