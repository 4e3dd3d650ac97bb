//! Hypercube configurations, the evaluation contract, the noise operator,
//! pivotal sets and structural checks.

mod configuration;
mod function;
mod noise;
mod pivotal;
mod structure;

pub use configuration::Configuration;
pub use function::{evaluate, BooleanFunction, Codomain, SharedFunction, Ternary};
pub use noise::{apply_noise, apply_noise_in_place};
pub use pivotal::{pivotal_count, pivotal_set};
pub use structure::{
    check_invariance, check_monotone, check_monotone_capped, is_transitive, orbit, spot_check_monotone, InvarianceMode,
    InvarianceReport, MonotoneReport, MonotoneViolation, Permutation, SpotCheck, EXHAUSTIVE_CAP,
};
