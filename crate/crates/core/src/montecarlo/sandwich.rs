use serde::{Deserialize, Serialize};

use crate::constructions::TribesParams;
use crate::error::{check_bias, check_probability, LabError, Result};
use crate::hypercube::{apply_noise_in_place, Configuration, Ternary};
use crate::rng::RandomStream;

use super::estimate::combined_stderr;
use super::parallel::{run_samples, Tally};
use super::tribes_stats::TribeHistogram;
use super::{Estimate, Provenance};

/// Coupled estimates on `(ω, N_ε ω)` for the bribed majority.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub l: usize,
    pub k: usize,
    pub epsilon: f64,
    pub p: f64,
    /// `P[g(ω) ≠ g(N_ε ω)]`.
    pub g: Estimate,
    /// `P[Maj(ω) ≠ Maj(N_ε ω)]`.
    pub maj: Estimate,
    /// `P[f(ω) ≠ 0 ∨ f(N_ε ω) ≠ 0]`.
    pub f_active: Estimate,
    /// Samples where `g` disagreed although `Maj` agreed and `f` was `0` at
    /// both ends. Always zero.
    pub pathwise_violations: u64,
    /// `ĝ − maj − f_active − 4·combined stderr`; the bound holds when `<= 0`.
    pub slack: f64,
}

impl SandwichReport {
    pub fn bound_holds(&self) -> bool {
        self.slack <= 0.0 && self.pathwise_violations == 0
    }

    pub fn rhs(&self) -> f64 {
        self.maj.point + self.f_active.point + 4.0 * combined_stderr(&[&self.g, &self.maj, &self.f_active])
    }
}

struct SandwichTally {
    g: u64,
    maj: u64,
    f_active: u64,
    violations: u64,
    omega: Configuration,
    noisy: Configuration,
    h: TribeHistogram,
}

impl Tally for SandwichTally {
    fn merge(&mut self, o: Self) {
        self.g += o.g;
        self.maj += o.maj;
        self.f_active += o.f_active;
        self.violations += o.violations;
    }
}

/// Jointly estimates the three disagreement probabilities on the same
/// samples and checks `P[g ≠ g_ε] <= P[Maj ≠ Maj_ε] + P[f ≠ 0 at either end]`.
pub fn mc_stability_sandwich(params: TribesParams, eps: f64, p: f64, n_samples: u64, stream: RandomStream) -> Result<SandwichReport> {
    check_probability("epsilon", eps)?;
    check_bias(p)?;
    if n_samples == 0 {
        return Err(LabError::InvalidParameter("n_samples must be positive".into()));
    }
    let n = params.n();
    let t = run_samples(
        n_samples,
        stream,
        || SandwichTally {
            g: 0,
            maj: 0,
            f_active: 0,
            violations: 0,
            omega: Configuration::all_minus(n),
            noisy: Configuration::all_minus(n),
            h: TribeHistogram::new(params.l()),
        },
        |acc, rng, _| {
            acc.omega.fill_random(p, rng);
            acc.noisy.clone_from(&acc.omega);
            apply_noise_in_place(&mut acc.noisy, eps, p, rng).expect("validated above");
            acc.h.fill_from_configuration(&acc.omega, params);
            let a = acc.h.stats();
            acc.h.fill_from_configuration(&acc.noisy, params);
            let b = acc.h.stats();
            let g = a.g != b.g;
            let maj = a.maj != b.maj;
            let active = a.f != Ternary::Zero || b.f != Ternary::Zero;
            acc.g += g as u64;
            acc.maj += maj as u64;
            acc.f_active += active as u64;
            acc.violations += (g && !maj && !active) as u64;
        },
    );
    let prov = Provenance::new(stream, n_samples);
    let g = Estimate::proportion(t.g, n_samples, prov);
    let maj = Estimate::proportion(t.maj, n_samples, prov);
    let f_active = Estimate::proportion(t.f_active, n_samples, prov);
    let slack = g.point - maj.point - f_active.point - 4.0 * combined_stderr(&[&g, &maj, &f_active]);
    Ok(SandwichReport { l: params.l(), k: params.k(), epsilon: eps, p, g, maj, f_active, pathwise_violations: t.violations, slack })
}
