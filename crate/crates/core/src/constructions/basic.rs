use serde::{Deserialize, Serialize};

use crate::dynamics::IncrementalSession;
use crate::error::{LabError, Result};
use crate::hypercube::{BooleanFunction, Codomain, Configuration, SharedFunction, Ternary};

use super::FunctionDescriptor;

/// What majority returns when the coordinate sum is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    /// A zero sum maps to `+1`; monotone and permutation invariant.
    #[default]
    Plus,
    /// Only odd arities are accepted.
    Error,
}

/// Sign of the coordinate sum.
#[derive(Debug, Clone)]
pub struct Majority {
    n: usize,
    tie: TieRule,
}

impl Majority {
    pub fn new(n: usize, tie: TieRule) -> Result<Self> {
        if n == 0 {
            return Err(LabError::InvalidParameter("majority needs n >= 1".into()));
        }
        if tie == TieRule::Error && n % 2 == 0 {
            return Err(LabError::InvalidParameter(format!("majority on even n = {n} needs a tie rule")));
        }
        Ok(Majority { n, tie })
    }
}

#[inline]
fn sign_of_sum(sum: i64) -> Ternary {
    Ternary::from_bool(sum >= 0)
}

impl BooleanFunction for Majority {
    fn arity(&self) -> usize {
        self.n
    }

    fn eval(&self, c: &Configuration) -> Ternary {
        sign_of_sum(c.sign_sum())
    }

    fn codomain(&self) -> Codomain {
        Codomain::Boolean
    }

    fn declared_monotone(&self) -> bool {
        true
    }

    fn session(&self) -> Box<dyn IncrementalSession + '_> {
        Box::new(SumSession { sum: 0 })
    }

    fn descriptor(&self) -> Option<FunctionDescriptor> {
        Some(FunctionDescriptor::Majority { n: self.n, tie_rule: self.tie })
    }
}

struct SumSession {
    sum: i64,
}

impl IncrementalSession for SumSession {
    fn load(&mut self, c: &Configuration) -> Ternary {
        self.sum = c.sign_sum();
        self.value()
    }

    fn toggle(&mut self, _i: usize, now_plus: bool) -> Ternary {
        self.sum += if now_plus { 2 } else { -2 };
        self.value()
    }

    fn value(&self) -> Ternary {
        sign_of_sum(self.sum)
    }
}

/// `ω ↦ ω_index`.
#[derive(Debug, Clone)]
pub struct Dictator {
    n: usize,
    index: usize,
}

impl Dictator {
    pub fn new(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(LabError::IndexOutOfRange { index, n });
        }
        Ok(Dictator { n, index })
    }
}

impl BooleanFunction for Dictator {
    fn arity(&self) -> usize {
        self.n
    }

    fn eval(&self, c: &Configuration) -> Ternary {
        Ternary::from_bool(c.is_plus(self.index))
    }

    fn codomain(&self) -> Codomain {
        Codomain::Boolean
    }

    fn declared_monotone(&self) -> bool {
        true
    }

    fn session(&self) -> Box<dyn IncrementalSession + '_> {
        Box::new(DictatorSession { index: self.index, value: Ternary::Minus })
    }

    fn descriptor(&self) -> Option<FunctionDescriptor> {
        Some(FunctionDescriptor::Dictator { n: self.n, index: self.index })
    }
}

struct DictatorSession {
    index: usize,
    value: Ternary,
}

impl IncrementalSession for DictatorSession {
    fn load(&mut self, c: &Configuration) -> Ternary {
        self.value = Ternary::from_bool(c.is_plus(self.index));
        self.value
    }

    fn toggle(&mut self, i: usize, now_plus: bool) -> Ternary {
        if i == self.index {
            self.value = Ternary::from_bool(now_plus);
        }
        self.value
    }

    fn value(&self) -> Ternary {
        self.value
    }
}

/// Product of all coordinates.
#[derive(Debug, Clone)]
pub struct Parity {
    n: usize,
}

impl Parity {
    pub fn new(n: usize) -> Self {
        Parity { n }
    }
}

impl BooleanFunction for Parity {
    fn arity(&self) -> usize {
        self.n
    }

    fn eval(&self, c: &Configuration) -> Ternary {
        Ternary::from_bool((self.n - c.count_plus()) % 2 == 0)
    }

    fn codomain(&self) -> Codomain {
        Codomain::Boolean
    }

    fn session(&self) -> Box<dyn IncrementalSession + '_> {
        Box::new(ParitySession { even_minus: true, n: self.n })
    }

    fn descriptor(&self) -> Option<FunctionDescriptor> {
        Some(FunctionDescriptor::Parity { n: self.n })
    }
}

struct ParitySession {
    even_minus: bool,
    n: usize,
}

impl IncrementalSession for ParitySession {
    fn load(&mut self, c: &Configuration) -> Ternary {
        self.even_minus = (self.n - c.count_plus()) % 2 == 0;
        self.value()
    }

    fn toggle(&mut self, _i: usize, _now_plus: bool) -> Ternary {
        self.even_minus = !self.even_minus;
        self.value()
    }

    fn value(&self) -> Ternary {
        Ternary::from_bool(self.even_minus)
    }
}

#[derive(Debug, Clone)]
pub struct Constant {
    n: usize,
    value: Ternary,
}

impl Constant {
    pub fn new(n: usize, value: Ternary) -> Self {
        Constant { n, value }
    }
}

impl BooleanFunction for Constant {
    fn arity(&self) -> usize {
        self.n
    }

    fn eval(&self, _c: &Configuration) -> Ternary {
        self.value
    }

    fn codomain(&self) -> Codomain {
        match self.value {
            Ternary::Zero => Codomain::ZeroOne,
            _ => Codomain::Boolean,
        }
    }

    fn declared_monotone(&self) -> bool {
        true
    }

    fn session(&self) -> Box<dyn IncrementalSession + '_> {
        Box::new(ConstantSession(self.value))
    }

    fn descriptor(&self) -> Option<FunctionDescriptor> {
        Some(FunctionDescriptor::Constant { n: self.n, value: self.value.to_i8() })
    }
}

struct ConstantSession(Ternary);

impl IncrementalSession for ConstantSession {
    fn load(&mut self, _c: &Configuration) -> Ternary {
        self.0
    }

    fn toggle(&mut self, _i: usize, _now_plus: bool) -> Ternary {
        self.0
    }

    fn value(&self) -> Ternary {
        self.0
    }
}

/// `g = h` where the bribe `f` is `0`, and `g = f` elsewhere.
///
/// With `h = Maj` and `f` the tribes bribe this is the noise-stable function
/// with many pivotal bits; with any other Boolean `h` it is the generic
/// modification that keeps `g` close to `h` while adding pivotals.
#[derive(Debug, Clone)]
pub struct Bribed {
    base: SharedFunction,
    bribe: SharedFunction,
}

impl Bribed {
    pub fn new(base: SharedFunction, bribe: SharedFunction) -> Result<Self> {
        if base.arity() != bribe.arity() {
            return Err(LabError::ArityMismatch { expected: base.arity(), found: bribe.arity() });
        }
        if base.codomain() != Codomain::Boolean {
            return Err(LabError::InvalidParameter("the base of a bribed function must be {-1, +1}-valued".into()));
        }
        Ok(Bribed { base, bribe })
    }

    pub fn base(&self) -> &SharedFunction {
        &self.base
    }

    pub fn bribe(&self) -> &SharedFunction {
        &self.bribe
    }
}

#[inline]
fn combine(bribe: Ternary, base: Ternary) -> Ternary {
    if bribe == Ternary::Zero {
        base
    } else {
        bribe
    }
}

impl BooleanFunction for Bribed {
    fn arity(&self) -> usize {
        self.base.arity()
    }

    fn eval(&self, c: &Configuration) -> Ternary {
        match self.bribe.eval(c) {
            Ternary::Zero => self.base.eval(c),
            v => v,
        }
    }

    fn codomain(&self) -> Codomain {
        Codomain::Boolean
    }

    fn declared_monotone(&self) -> bool {
        self.base.declared_monotone() && self.bribe.declared_monotone()
    }

    fn session(&self) -> Box<dyn IncrementalSession + '_> {
        Box::new(BribedSession { base: self.base.session(), bribe: self.bribe.session() })
    }

    fn descriptor(&self) -> Option<FunctionDescriptor> {
        let base = self.base.descriptor()?;
        match self.bribe.descriptor()? {
            FunctionDescriptor::Bribable { l, k } => {
                let default_base = FunctionDescriptor::Majority { n: l * k, tie_rule: TieRule::Plus };
                let base = (base != default_base).then(|| Box::new(base));
                Some(FunctionDescriptor::Bribed { l, k, base })
            }
            _ => None,
        }
    }
}

struct BribedSession<'a> {
    base: Box<dyn IncrementalSession + 'a>,
    bribe: Box<dyn IncrementalSession + 'a>,
}

impl IncrementalSession for BribedSession<'_> {
    fn load(&mut self, c: &Configuration) -> Ternary {
        let b = self.base.load(c);
        combine(self.bribe.load(c), b)
    }

    fn toggle(&mut self, i: usize, now_plus: bool) -> Ternary {
        let b = self.base.toggle(i, now_plus);
        combine(self.bribe.toggle(i, now_plus), b)
    }

    fn value(&self) -> Ternary {
        combine(self.bribe.value(), self.base.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::constructions::{Bribable, TribesParams};

    fn cfg(s: &str) -> Configuration {
        s.parse().unwrap()
    }

    #[test]
    fn majority_values_and_ties() {
        let m3 = Majority::new(3, TieRule::Error).unwrap();
        assert_eq!(m3.eval(&cfg("++-")), Ternary::Plus);
        assert_eq!(m3.eval(&cfg("+--")), Ternary::Minus);
        let m2 = Majority::new(2, TieRule::Plus).unwrap();
        assert_eq!(m2.eval(&cfg("+-")), Ternary::Plus);
        assert!(Majority::new(2, TieRule::Error).is_err());
        assert!(Majority::new(0, TieRule::Plus).is_err());
    }

    #[test]
    fn dictator_and_parity() {
        let d = Dictator::new(2, 0).unwrap();
        assert_eq!(d.eval(&cfg("+-")), Ternary::Plus);
        assert!(Dictator::new(2, 2).is_err());
        let p = Parity::new(3);
        assert_eq!(p.eval(&cfg("+++")), Ternary::Plus);
        assert_eq!(p.eval(&cfg("-++")), Ternary::Minus);
        assert_eq!(p.eval(&cfg("--+")), Ternary::Plus);
    }

    #[test]
    fn zero_bribe_is_transparent() {
        let base: SharedFunction = Arc::new(Majority::new(5, TieRule::Error).unwrap());
        let g = Bribed::new(base.clone(), Arc::new(Constant::new(5, Ternary::Zero))).unwrap();
        for code in 0..32 {
            let c = Configuration::from_code(5, code);
            assert_eq!(g.eval(&c), base.eval(&c));
        }
    }

    #[test]
    fn bribed_rejects_bad_inputs() {
        let maj: SharedFunction = Arc::new(Majority::new(4, TieRule::Plus).unwrap());
        let f3: SharedFunction = Arc::new(Constant::new(3, Ternary::Zero));
        assert!(matches!(Bribed::new(maj.clone(), f3), Err(LabError::ArityMismatch { .. })));
        let ternary_base: SharedFunction = Arc::new(Bribable::new(TribesParams::new(2, 2).unwrap()));
        assert!(Bribed::new(ternary_base, maj).is_err());
    }

    #[test]
    fn sessions_agree_with_eval() {
        let params = TribesParams::new(2, 3).unwrap();
        let g = Bribed::new(
            Arc::new(Majority::new(6, TieRule::Plus).unwrap()),
            Arc::new(Bribable::new(params)),
        )
        .unwrap();
        let fs: Vec<Box<dyn BooleanFunction>> = vec![
            Box::new(Majority::new(6, TieRule::Plus).unwrap()),
            Box::new(Dictator::new(6, 4).unwrap()),
            Box::new(Parity::new(6)),
            Box::new(Constant::new(6, Ternary::Minus)),
            Box::new(g),
        ];
        for f in &fs {
            let mut c = cfg("+-+--+");
            let mut s = f.session();
            assert_eq!(s.load(&c), f.eval(&c));
            for i in [0, 3, 3, 5, 1, 2, 4, 0, 1] {
                let now = c.toggle(i);
                assert_eq!(s.toggle(i, now), f.eval(&c), "{f:?}");
                assert_eq!(s.value(), f.eval(&c));
            }
        }
    }
}
