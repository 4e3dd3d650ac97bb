use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::hypercube::BooleanFunction;

use super::{wht, TruthTable};

pub const MARGINAL_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginalOrder {
    First,
    Second,
}

/// Inclusion probabilities of single coordinates (`First`) or unordered
/// pairs `i < j` (`Second`), in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalTable {
    pub order: MarginalOrder,
    pub entries: Vec<(Vec<usize>, f64)>,
}

impl MarginalTable {
    pub fn max_abs_diff(&self, other: &MarginalTable) -> f64 {
        assert_eq!(self.order, other.order);
        assert_eq!(self.entries.len(), other.entries.len());
        self.entries.iter().zip(&other.entries).map(|((_, a), (_, b))| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn get(&self, index: &[usize]) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == index).map(|(_, v)| *v)
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn boolean_table(f: &dyn BooleanFunction) -> Result<TruthTable> {
    if f.arity() > MARGINAL_CAP {
        return Err(LabError::CapExceeded { n: f.arity(), cap: MARGINAL_CAP });
    }
    let t = TruthTable::build(f)?;
    if t.is_boolean() {
        return Ok(t);
    }
    // {0, 1}-valued: use 2f − 1, which has the same pivotal set.
    if t.values().iter().all(|&v| v >= 0) {
        let signed = t.values().iter().map(|&v| if v == 0 { -1 } else { 1 }).collect();
        return TruthTable::from_values(t.arity(), signed);
    }
    Err(LabError::Unsupported("spectral sample marginals need a two-valued function".into()))
}

/// `P[i ∈ 𝒮] = Σ_{S∋i} f̂(S)²` or `P[{i,j} ⊆ 𝒮] = Σ_{S⊇{i,j}} f̂(S)²`.
///
/// `{0, 1}`-valued functions are taken in their `±1` form; ternary
/// functions are rejected.
pub fn spectral_marginals(f: &dyn BooleanFunction, order: MarginalOrder) -> Result<MarginalTable> {
    let t = boolean_table(f)?;
    let n = t.arity();
    let s = wht(&t);
    let weight = |required: usize| -> f64 {
        s.coefficients()
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask & required == required)
            .map(|(_, c)| c * c)
            .sum()
    };
    let entries = match order {
        MarginalOrder::First => (0..n).map(|i| (vec![i], weight(1 << i))).collect(),
        MarginalOrder::Second => pairs(n).map(|(i, j)| (vec![i, j], weight(1 << i | 1 << j))).collect(),
    };
    Ok(MarginalTable { order, entries })
}

/// `P[i ∈ 𝒫]` or `P[{i,j} ⊆ 𝒫]` by enumeration of pivotal sets.
pub fn pivotal_marginals(f: &dyn BooleanFunction, order: MarginalOrder) -> Result<MarginalTable> {
    if f.arity() > MARGINAL_CAP {
        return Err(LabError::CapExceeded { n: f.arity(), cap: MARGINAL_CAP });
    }
    let t = TruthTable::build(f)?;
    let n = t.arity();
    let masks: Vec<u64> = (0..t.len()).map(|c| t.pivotal_mask(c)).collect();
    let total = t.len() as f64;
    let freq = |required: u64| masks.iter().filter(|&&m| m & required == required).count() as f64 / total;
    let entries = match order {
        MarginalOrder::First => (0..n).map(|i| (vec![i], freq(1 << i))).collect(),
        MarginalOrder::Second => pairs(n).map(|(i, j)| (vec![i, j], freq(1 << i | 1 << j))).collect(),
    };
    Ok(MarginalTable { order, entries })
}
