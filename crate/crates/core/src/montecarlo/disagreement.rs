use crate::error::{check_bias, check_probability, LabError, Result};
use crate::hypercube::{apply_noise_in_place, BooleanFunction, Configuration};
use crate::rng::RandomStream;

use super::parallel::{run_samples, Tally};
use super::{Estimate, Provenance};

struct DisagreeTally {
    hits: u64,
    n: u64,
    omega: Configuration,
    noisy: Configuration,
}

impl Tally for DisagreeTally {
    fn merge(&mut self, other: Self) {
        self.hits += other.hits;
        self.n += other.n;
    }
}

/// Estimates `P[f(ω) ≠ f(N_ε ω)]` with `ω ~ P_p`.
pub fn mc_disagreement(f: &dyn BooleanFunction, eps: f64, p: f64, n_samples: u64, stream: RandomStream) -> Result<Estimate> {
    check_probability("epsilon", eps)?;
    check_bias(p)?;
    if n_samples == 0 {
        return Err(LabError::InvalidParameter("n_samples must be positive".into()));
    }
    let n = f.arity();
    let tally = run_samples(
        n_samples,
        stream,
        || DisagreeTally { hits: 0, n: 0, omega: Configuration::all_minus(n), noisy: Configuration::all_minus(n) },
        |acc, rng, _| {
            acc.omega.fill_random(p, rng);
            acc.noisy.clone_from(&acc.omega);
            apply_noise_in_place(&mut acc.noisy, eps, p, rng).expect("validated above");
            acc.hits += (f.eval(&acc.omega) != f.eval(&acc.noisy)) as u64;
            acc.n += 1;
        },
    );
    debug_assert_eq!(tally.n, n_samples);
    Ok(Estimate::proportion(tally.hits, n_samples, Provenance::new(stream, n_samples)))
}
