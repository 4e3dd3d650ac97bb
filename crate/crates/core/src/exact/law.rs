use std::io::{self, Write};

use serde::Serialize;

use crate::constructions::TribesParams;
use crate::error::{LabError, Result};
use crate::hypercube::{BooleanFunction, Ternary};

use super::TruthTable;

pub const LAW_CAP: usize = 20;

/// Exact joint law of `(f(ω), |𝒫(ω)|)` under the uniform measure, kept as
/// integer counts over `2^n` configurations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PivotalLaw {
    n: usize,
    /// `joint[m][v.index()]` = number of configurations with `f = v` and `m` pivotal coordinates.
    joint: Vec<[u64; 3]>,
}

pub fn pivotal_law(f: &dyn BooleanFunction) -> Result<PivotalLaw> {
    if f.arity() > LAW_CAP {
        return Err(LabError::CapExceeded { n: f.arity(), cap: LAW_CAP });
    }
    let t = TruthTable::build(f)?;
    Ok(PivotalLaw::from_table(&t))
}

impl PivotalLaw {
    pub fn from_table(t: &TruthTable) -> Self {
        let n = t.arity();
        let mut joint = vec![[0u64; 3]; n + 1];
        for code in 0..t.len() {
            let m = t.pivotal_mask(code).count_ones() as usize;
            joint[m][t.get(code).index()] += 1;
        }
        PivotalLaw { n, joint }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> u64 {
        1u64 << self.n
    }

    pub fn count(&self, v: Ternary, m: usize) -> u64 {
        self.joint.get(m).map_or(0, |row| row[v.index()])
    }

    pub fn probability(&self, v: Ternary, m: usize) -> f64 {
        self.count(v, m) as f64 / self.total() as f64
    }

    pub fn value_count(&self, v: Ternary) -> u64 {
        self.joint.iter().map(|row| row[v.index()]).sum()
    }

    /// `Σ |𝒫|` over configurations with `f = v` (exact).
    pub fn pivotal_sum(&self, v: Ternary) -> u64 {
        self.joint.iter().enumerate().map(|(m, row)| m as u64 * row[v.index()]).sum()
    }

    /// `E[|𝒫|]`.
    pub fn mean(&self) -> f64 {
        let s: u64 = Ternary::ALL.iter().map(|&v| self.pivotal_sum(v)).sum();
        s as f64 / self.total() as f64
    }

    /// `E[|𝒫| | f = v]`, `None` when `P[f = v] = 0`.
    pub fn conditional_mean(&self, v: Ternary) -> Option<f64> {
        let c = self.value_count(v);
        (c > 0).then(|| self.pivotal_sum(v) as f64 / c as f64)
    }

    /// `P[|𝒫| > a | f = v]`.
    pub fn conditional_tail(&self, v: Ternary, a: usize) -> Option<f64> {
        let c = self.value_count(v);
        let above: u64 = self.joint.iter().skip(a + 1).map(|row| row[v.index()]).sum();
        (c > 0).then(|| above as f64 / c as f64)
    }

    /// `P[|𝒫| > a]`.
    pub fn tail(&self, a: usize) -> f64 {
        let above: u64 = self.joint.iter().skip(a + 1).flatten().sum();
        above as f64 / self.total() as f64
    }

    /// Marginal law of `|𝒫|`.
    pub fn size_distribution(&self) -> Vec<f64> {
        self.joint.iter().map(|row| row.iter().sum::<u64>() as f64 / self.total() as f64).collect()
    }

    /// CSV rows `value,pivotal_count,count,probability`, nonzero entries only.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "value,pivotal_count,count,probability")?;
        for v in Ternary::ALL {
            for m in 0..=self.n {
                let c = self.count(v, m);
                if c > 0 {
                    writeln!(w, "{},{},{},{}", v.to_i8(), m, c, self.probability(v, m))?;
                }
            }
        }
        Ok(())
    }
}

/// Exhaustive census of a tribes layout: counts of `Tribes = 0` and sums of
/// the number `X` of pivotal tribes (exactly one `−1`), split by the value of
/// `Tribes`. All quantities are exact integers over `2^{lk}` configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TribesCensus {
    pub l: usize,
    pub k: usize,
    pub total: u64,
    pub zero: u64,
    pub x_sum: u64,
    pub x_sum_zero: u64,
    pub x_sum_one: u64,
}

impl TribesCensus {
    pub fn one(&self) -> u64 {
        self.total - self.zero
    }
}

/// Walks every configuration of the layout.
pub fn tribes_census(params: TribesParams) -> Result<TribesCensus> {
    let (l, k, n) = (params.l(), params.k(), params.n());
    if n > LAW_CAP + 4 {
        return Err(LabError::CapExceeded { n, cap: LAW_CAP + 4 });
    }
    let tribe_mask = if l == 64 { u64::MAX } else { (1u64 << l) - 1 };
    let mut census = TribesCensus { l, k, total: 1 << n, zero: 0, x_sum: 0, x_sum_zero: 0, x_sum_one: 0 };
    for code in 0..1u64 << n {
        let mut full = false;
        let mut x = 0u64;
        for t in 0..k {
            let plus = ((code >> (t * l)) & tribe_mask).count_ones() as usize;
            full |= plus == l;
            x += (plus + 1 == l) as u64;
        }
        census.x_sum += x;
        if full {
            census.x_sum_one += x;
        } else {
            census.zero += 1;
            census.x_sum_zero += x;
        }
    }
    Ok(census)
}
