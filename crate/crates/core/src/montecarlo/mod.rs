//! Large-n estimators on reproducible parallel streams.
//!
//! Sample `s` of a run based at stream `b` draws from stream `b + s` only,
//! and all tallies are integers, so any run is reproducible in isolation and
//! independent of the worker count.

mod disagreement;
mod estimate;
mod parallel;
mod pivotal_count;
mod sandwich;
mod tribes_stats;

pub use disagreement::mc_disagreement;
pub use estimate::{combined_stderr, wilson, Estimate, Provenance, Z95};
pub use parallel::{run_samples, Tally};
pub use pivotal_count::{chi_square, chi_square_critical, chi_square_p_value, mc_pivotal_count, PivotalCountLaw};
pub use sandwich::{mc_stability_sandwich, SandwichReport};
pub use tribes_stats::{
    mc_tribes_stats, HistogramSampler, TribeHistogram, TribeSampler, TribesSampleStats, TribesStatsOptions, TribesStatsReport,
    TribesTally,
};
