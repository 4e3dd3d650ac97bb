//! Function families: tribes, the ternary tribes bribe, majority, bribed
//! composites, and a few reference functions; plus the `(l, k)` schedule.

mod basic;
mod descriptor;
mod schedule;
mod tribes;

pub use basic::{Bribed, Constant, Dictator, Majority, Parity, TieRule};
pub use descriptor::FunctionDescriptor;
pub use schedule::{
    doubling_k, pivotal_threshold, schedule, schedule_l, tribes_zero_probability, Rounding, ScheduleEntry, ThresholdRule,
};
pub(crate) use tribes::bribable_value;
pub use tribes::{tribes_generators, Bribable, Tribes, TribesParams};

use std::sync::Arc;

use crate::error::Result;
use crate::hypercube::SharedFunction;

/// `g = Maj` bribed by `Tribes(ω) − Tribes(−ω)` on the given layout.
pub fn bribed_majority(params: TribesParams) -> Result<Bribed> {
    Bribed::new(Arc::new(Majority::new(params.n(), TieRule::Plus)?), Arc::new(Bribable::new(params)))
}

pub fn tribes(params: TribesParams) -> SharedFunction {
    Arc::new(Tribes::new(params))
}

pub fn bribable_f(params: TribesParams) -> SharedFunction {
    Arc::new(Bribable::new(params))
}

pub fn majority(n: usize, tie: TieRule) -> Result<SharedFunction> {
    Ok(Arc::new(Majority::new(n, tie)?))
}

pub fn bribed(base: SharedFunction, bribe: SharedFunction) -> Result<SharedFunction> {
    Ok(Arc::new(Bribed::new(base, bribe)?))
}
