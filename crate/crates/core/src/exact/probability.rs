use crate::error::{check_bias, check_probability, LabError, Result};
use crate::hypercube::{BooleanFunction, Ternary};

use super::spectrum::polynomial_in_rho;
use super::{wht, Spectrum, TruthTable};

pub const DISAGREEMENT_CAP: usize = 20;
pub const DIRECT_DISAGREEMENT_CAP: usize = 10;
pub const INFLUENCE_CAP: usize = 22;

/// Number of configurations with `f = v`.
pub fn exact_count(f: &dyn BooleanFunction, v: Ternary) -> Result<u64> {
    Ok(TruthTable::build(f)?.count(v))
}

/// `P_p[f = v]` by weighted enumeration. Configurations are grouped by
/// their `+1` count before weighting, so at `p = 1/2` the result is the
/// exact rational `count / 2^n`.
pub fn exact_prob(f: &dyn BooleanFunction, v: Ternary, p: f64) -> Result<f64> {
    check_bias(p)?;
    let t = TruthTable::build(f)?;
    let n = t.arity();
    let target = v.to_i8();
    let mut by_weight = vec![0u64; n + 1];
    for (code, &x) in t.values().iter().enumerate() {
        if x == target {
            by_weight[code.count_ones() as usize] += 1;
        }
    }
    if p == 0.5 {
        let total: u64 = by_weight.iter().sum();
        return Ok(total as f64 / (1u64 << n) as f64);
    }
    Ok(by_weight
        .iter()
        .enumerate()
        .map(|(m, &c)| c as f64 * p.powi(m as i32) * (1.0 - p).powi((n - m) as i32))
        .sum())
}

/// `P[f(ω) ≠ f(N_ε ω)]` at `p = 1/2`, by the spectral route.
///
/// Each output value `v` gets the spectrum `ĥ_v` of its indicator; then
/// `P = Σ_{v≠w} Σ_S (1−ε)^{|S|} ĥ_v(S) ĥ_w(S)`.
pub fn exact_disagreement(f: &dyn BooleanFunction, eps: f64, p: f64) -> Result<f64> {
    check_probability("epsilon", eps)?;
    if p != 0.5 {
        return Err(LabError::Unsupported("spectral disagreement is only available at p = 1/2".into()));
    }
    if f.arity() > DISAGREEMENT_CAP {
        return Err(LabError::CapExceeded { n: f.arity(), cap: DISAGREEMENT_CAP });
    }
    let t = TruthTable::build(f)?;
    Ok(DisagreementCurve::new(&t).at(eps))
}

/// Precomputed level weights so the disagreement can be evaluated at many `ε`.
#[derive(Debug, Clone)]
pub struct DisagreementCurve {
    cross_levels: Vec<f64>,
}

impl DisagreementCurve {
    pub fn new(t: &TruthTable) -> Self {
        let n = t.arity();
        let present: Vec<Spectrum> = Ternary::ALL
            .iter()
            .filter(|&&v| t.count(v) > 0)
            .map(|&v| Spectrum::of_reals(n, t.indicator(v)))
            .collect();
        let mut cross_levels = vec![0.0; n + 1];
        for (a, sa) in present.iter().enumerate() {
            for (b, sb) in present.iter().enumerate() {
                if a != b {
                    for (acc, w) in cross_levels.iter_mut().zip(sa.level_cross_weights(sb)) {
                        *acc += w;
                    }
                }
            }
        }
        DisagreementCurve { cross_levels }
    }

    pub fn at(&self, eps: f64) -> f64 {
        polynomial_in_rho(&self.cross_levels, 1.0 - eps)
    }
}

/// `P[f(ω) ≠ f(N_ε ω)]` at `p = 1/2` by summing over all `4^n` pairs
/// `(ω, ω')`. Reference route for small arities.
pub fn direct_disagreement(f: &dyn BooleanFunction, eps: f64) -> Result<f64> {
    check_probability("epsilon", eps)?;
    let n = f.arity();
    if n > DIRECT_DISAGREEMENT_CAP {
        return Err(LabError::CapExceeded { n, cap: DIRECT_DISAGREEMENT_CAP });
    }
    let t = TruthTable::build(f)?;
    // Each coordinate differs independently with probability ε/2.
    let differ = eps / 2.0;
    let pow_differ: Vec<f64> = (0..=n).map(|d| differ.powi(d as i32) * (1.0 - differ).powi((n - d) as i32)).collect();
    let size = 1usize << n;
    let mut total = 0.0;
    for x in 0..size {
        for y in 0..size {
            if t.values()[x] != t.values()[y] {
                total += pow_differ[(x ^ y).count_ones() as usize];
            }
        }
    }
    Ok(total / size as f64)
}

/// `Inf_i = P[i is pivotal]` for every coordinate, by edge scan.
pub fn influences(f: &dyn BooleanFunction) -> Result<Vec<f64>> {
    let counts = influence_counts(f)?;
    let total = (1u64 << f.arity()) as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Number of configurations at which each coordinate is pivotal.
pub fn influence_counts(f: &dyn BooleanFunction) -> Result<Vec<u64>> {
    if f.arity() > INFLUENCE_CAP {
        return Err(LabError::CapExceeded { n: f.arity(), cap: INFLUENCE_CAP });
    }
    let t = TruthTable::build(f)?;
    let v = t.values();
    Ok((0..t.arity())
        .map(|i| {
            let bit = 1usize << i;
            (0..v.len()).filter(|&c| v[c] != v[c ^ bit]).count() as u64
        })
        .collect())
}

/// `E[f·g]` by enumeration.
pub fn inner_product(f: &dyn BooleanFunction, g: &dyn BooleanFunction) -> Result<f64> {
    if f.arity() != g.arity() {
        return Err(LabError::ArityMismatch { expected: f.arity(), found: g.arity() });
    }
    let (tf, tg) = (TruthTable::build(f)?, TruthTable::build(g)?);
    let sum: i64 = tf.values().iter().zip(tg.values()).map(|(a, b)| (*a as i64) * (*b as i64)).sum();
    Ok(sum as f64 / tf.len() as f64)
}

/// Spectrum of `f` in one call.
pub fn spectrum(f: &dyn BooleanFunction) -> Result<Spectrum> {
    Ok(wht(&TruthTable::build(f)?))
}
