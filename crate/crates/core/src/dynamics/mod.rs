//! Continuous-time dynamics on the hypercube.
//!
//! Each coordinate carries a rate-1 Poisson clock; on `[0, duration]` the
//! number of rings is `Poisson(n·duration)` and each ring picks a uniform
//! coordinate, so event times are only materialized on request. The output
//! of the function is tracked through an [`IncrementalSession`] and `C`
//! counts its changes.

mod bound;
mod session;
mod simulate;
mod volatility;

pub use bound::{bound_verdict, pivotal_at_most, pivotal_bound_check, BoundVerdict, FLIP_ALL_CAP};
pub use session::{IncrementalSession, RecomputeSession};
pub use simulate::{simulate_timed, simulate_trajectory, DynamicsConfig, Semantics, TimedTrajectory, Trajectory};
pub use volatility::{
    run_trials, value_frequencies, volatility_curve, volatility_of, ChangeTally, VolatilityEntry, VolatilityReport,
};
