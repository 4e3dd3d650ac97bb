//! Exhaustive small-n engine: truth tables, Walsh–Hadamard spectra,
//! influences, exact probabilities and disagreement, pivotal-count laws and
//! spectral-sample marginals.
//!
//! At `p = 1/2` probabilities are rational counts over `2^n`, stored as
//! integers wherever a comparison needs to be exact.

mod law;
mod marginals;
mod probability;
mod spectrum;
mod table;

pub use law::{pivotal_law, tribes_census, PivotalLaw, TribesCensus, LAW_CAP};
pub use marginals::{pivotal_marginals, spectral_marginals, MarginalOrder, MarginalTable, MARGINAL_CAP};
pub use probability::{
    direct_disagreement, exact_count, exact_disagreement, exact_prob, influence_counts, influences, inner_product, spectrum,
    DisagreementCurve, DIRECT_DISAGREEMENT_CAP, DISAGREEMENT_CAP, INFLUENCE_CAP,
};
pub use spectrum::{fwht_in_place, wht, Spectrum};
pub use table::{TruthTable, TABLE_CAP};
