use serde::Serialize;

use crate::error::{LabError, Result};
use crate::hypercube::{BooleanFunction, Codomain, Configuration, Ternary};

/// Largest arity a truth table will be built for.
pub const TABLE_CAP: usize = 24;

/// Dense values of a function, indexed by configuration code (coordinate `i`
/// contributes bit `i`, set for `+1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruthTable {
    n: usize,
    values: Vec<i8>,
}

impl TruthTable {
    pub fn build(f: &dyn BooleanFunction) -> Result<Self> {
        Self::build_capped(f, TABLE_CAP)
    }

    pub fn build_capped(f: &dyn BooleanFunction, cap: usize) -> Result<Self> {
        let n = f.arity();
        let cap = cap.min(TABLE_CAP);
        if n > cap {
            return Err(LabError::CapExceeded { n, cap });
        }
        let values = (0..1u64 << n).map(|code| f.eval(&Configuration::from_code(n, code)).to_i8()).collect();
        Ok(TruthTable { n, values })
    }

    pub fn from_values(n: usize, values: Vec<i8>) -> Result<Self> {
        if n > TABLE_CAP {
            return Err(LabError::CapExceeded { n, cap: TABLE_CAP });
        }
        if values.len() != 1 << n {
            return Err(LabError::InvalidParameter(format!("truth table of arity {n} needs {} entries, got {}", 1u64 << n, values.len())));
        }
        if values.iter().any(|v| !(-1..=1).contains(v)) {
            return Err(LabError::InvalidParameter("truth table entries must be -1, 0 or 1".into()));
        }
        Ok(TruthTable { n, values })
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, code: usize) -> Ternary {
        Ternary::from_i8(self.values[code]).expect("entries are ternary")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `{0, 1}`-valued indicator of `f = v`, as reals.
    pub fn indicator(&self, v: Ternary) -> Vec<f64> {
        let v = v.to_i8();
        self.values.iter().map(|&x| if x == v { 1.0 } else { 0.0 }).collect()
    }

    pub fn as_reals(&self) -> Vec<f64> {
        self.values.iter().map(|&x| x as f64).collect()
    }

    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|&v| v != 0)
    }

    /// Number of codes with value `v`.
    pub fn count(&self, v: Ternary) -> u64 {
        let v = v.to_i8();
        self.values.iter().filter(|&&x| x == v).count() as u64
    }

    /// Bitmask of pivotal coordinates at `code`.
    #[inline]
    pub fn pivotal_mask(&self, code: usize) -> u64 {
        let v = self.values[code];
        let mut mask = 0u64;
        for i in 0..self.n {
            if self.values[code ^ (1 << i)] != v {
                mask |= 1 << i;
            }
        }
        mask
    }
}

/// A table is itself a function, looked up by configuration code.
impl BooleanFunction for TruthTable {
    fn arity(&self) -> usize {
        self.n
    }

    fn eval(&self, c: &Configuration) -> Ternary {
        self.get(c.code() as usize)
    }

    fn codomain(&self) -> Codomain {
        if self.is_boolean() {
            Codomain::Boolean
        } else if self.values.iter().all(|&v| v >= 0) {
            Codomain::ZeroOne
        } else {
            Codomain::Ternary
        }
    }
}
