//! A Boolean-function laboratory built around tribes-based bribes.
//!
//! The central object is `g = Maj` where `f = Tribes(ω) − Tribes(−ω)` is
//! `0`, and `g = f` elsewhere. Along the schedule
//! `l = ⌈log₂k + ½·log₂log₂k⌉` the bribe is almost surely `0` (so `g` inherits
//! the noise stability of majority), while with high probability single
//! flips can push it to either `+1` or `−1` (so `g` has many pivotal bits and
//! its value changes often under continuous-time dynamics).
//!
//! Modules:
//! - [`hypercube`]: configurations, the evaluation contract, noise, pivotal
//!   sets, monotonicity and invariance checks.
//! - [`constructions`]: the function families and the parameter schedule.
//! - [`exact`]: exhaustive enumeration and Walsh–Hadamard analysis for small n.
//! - [`montecarlo`]: estimators with Wilson intervals on reproducible streams.
//! - [`dynamics`]: continuous-time hypercube walks and volatility sweeps.

pub mod constructions;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod hypercube;
pub mod montecarlo;
pub mod rng;

pub use error::{LabError, Result};
pub use hypercube::{BooleanFunction, Configuration, SharedFunction, Ternary};
pub use rng::RandomStream;
