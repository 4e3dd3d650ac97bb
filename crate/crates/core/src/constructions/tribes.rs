use serde::{Deserialize, Serialize};

use crate::dynamics::IncrementalSession;
use crate::error::{LabError, Result};
use crate::hypercube::{BooleanFunction, Codomain, Configuration, Permutation, Ternary};

use super::FunctionDescriptor;

/// `k` tribes of `l` consecutive coordinates: tribe `t` owns `[t·l, (t+1)·l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TribesParams {
    l: usize,
    k: usize,
}

impl TribesParams {
    pub fn new(l: usize, k: usize) -> Result<Self> {
        if l == 0 || k == 0 {
            return Err(LabError::InvalidParameter(format!("tribes need l >= 1 and k >= 1, got l={l}, k={k}")));
        }
        if l.checked_mul(k).is_none() {
            return Err(LabError::InvalidParameter(format!("l·k overflows for l={l}, k={k}")));
        }
        Ok(TribesParams { l, k })
    }

    #[inline]
    pub fn l(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.l * self.k
    }

    #[inline]
    pub fn tribe_of(&self, i: usize) -> usize {
        i / self.l
    }

    /// `+1` count of every tribe, in tribe order.
    pub fn plus_counts<'a>(&self, c: &'a Configuration) -> impl Iterator<Item = u32> + 'a {
        let l = self.l;
        (0..self.k).map(move |t| c.count_plus_range(t * l, l))
    }
}

/// `Tribes(l, k)`: `1` iff some tribe is entirely `+1`, else `0`.
#[derive(Debug, Clone)]
pub struct Tribes {
    params: TribesParams,
}

impl Tribes {
    pub fn new(params: TribesParams) -> Self {
        Tribes { params }
    }

    pub fn params(&self) -> TribesParams {
        self.params
    }
}

impl BooleanFunction for Tribes {
    fn arity(&self) -> usize {
        self.params.n()
    }

    fn eval(&self, c: &Configuration) -> Ternary {
        let l = self.params.l as u32;
        if self.params.plus_counts(c).any(|m| m == l) {
            Ternary::Plus
        } else {
            Ternary::Zero
        }
    }

    fn codomain(&self) -> Codomain {
        Codomain::ZeroOne
    }

    fn declared_monotone(&self) -> bool {
        true
    }

    fn session(&self) -> Box<dyn IncrementalSession + '_> {
        Box::new(TribeSession::new(self.params, TribeReadout::Tribes))
    }

    fn descriptor(&self) -> Option<FunctionDescriptor> {
        Some(FunctionDescriptor::Tribes { l: self.params.l, k: self.params.k })
    }
}

/// `f(ω) = Tribes(ω) − Tribes(−ω)`: `+1` for a full `+1` tribe, `−1` for a
/// full `−1` tribe, `0` when neither or both occur.
#[derive(Debug, Clone)]
pub struct Bribable {
    params: TribesParams,
}

impl Bribable {
    pub fn new(params: TribesParams) -> Self {
        Bribable { params }
    }

    pub fn params(&self) -> TribesParams {
        self.params
    }
}

impl BooleanFunction for Bribable {
    fn arity(&self) -> usize {
        self.params.n()
    }

    fn eval(&self, c: &Configuration) -> Ternary {
        let l = self.params.l as u32;
        let (mut plus, mut minus) = (false, false);
        for m in self.params.plus_counts(c) {
            plus |= m == l;
            minus |= m == 0;
            if plus && minus {
                break;
            }
        }
        bribable_value(plus, minus)
    }

    fn codomain(&self) -> Codomain {
        Codomain::Ternary
    }

    fn declared_monotone(&self) -> bool {
        true
    }

    fn session(&self) -> Box<dyn IncrementalSession + '_> {
        Box::new(TribeSession::new(self.params, TribeReadout::Bribable))
    }

    fn descriptor(&self) -> Option<FunctionDescriptor> {
        Some(FunctionDescriptor::Bribable { l: self.params.l, k: self.params.k })
    }
}

#[inline]
pub(crate) fn bribable_value(full_plus: bool, full_minus: bool) -> Ternary {
    match (full_plus, full_minus) {
        (true, false) => Ternary::Plus,
        (false, true) => Ternary::Minus,
        _ => Ternary::Zero,
    }
}

#[derive(Debug, Clone, Copy)]
enum TribeReadout {
    Tribes,
    Bribable,
}

/// Per-tribe `+1` counts with running tallies of full tribes in each direction.
struct TribeSession {
    params: TribesParams,
    readout: TribeReadout,
    plus_counts: Vec<u32>,
    full_plus: usize,
    full_minus: usize,
}

impl TribeSession {
    fn new(params: TribesParams, readout: TribeReadout) -> Self {
        TribeSession { params, readout, plus_counts: vec![0; params.k], full_plus: 0, full_minus: 0 }
    }
}

impl IncrementalSession for TribeSession {
    fn load(&mut self, c: &Configuration) -> Ternary {
        let l = self.params.l as u32;
        self.full_plus = 0;
        self.full_minus = 0;
        for (slot, m) in self.plus_counts.iter_mut().zip(self.params.plus_counts(c)) {
            *slot = m;
            self.full_plus += (m == l) as usize;
            self.full_minus += (m == 0) as usize;
        }
        self.value()
    }

    fn toggle(&mut self, i: usize, now_plus: bool) -> Ternary {
        let l = self.params.l as u32;
        let m = &mut self.plus_counts[self.params.tribe_of(i)];
        if now_plus {
            self.full_minus -= (*m == 0) as usize;
            *m += 1;
            self.full_plus += (*m == l) as usize;
        } else {
            self.full_plus -= (*m == l) as usize;
            *m -= 1;
            self.full_minus += (*m == 0) as usize;
        }
        self.value()
    }

    fn value(&self) -> Ternary {
        match self.readout {
            TribeReadout::Tribes if self.full_plus > 0 => Ternary::Plus,
            TribeReadout::Tribes => Ternary::Zero,
            TribeReadout::Bribable => bribable_value(self.full_plus > 0, self.full_minus > 0),
        }
    }
}

/// Witnesses for the transitive action on a tribes layout: `σ` rotates the
/// tribes, `(t, j) -> (t+1 mod k, j)`, and `τ` rotates the members of tribe
/// 0, `(0, j) -> (0, j+1 mod l)`. Both preserve `Tribes`, its negated copy and
/// every symmetric function, and together they reach every coordinate.
pub fn tribes_generators(params: TribesParams) -> Vec<Permutation> {
    let (l, k) = (params.l, params.k);
    let n = params.n();
    let sigma: Vec<usize> = (0..n).map(|i| ((i / l + 1) % k) * l + i % l).collect();
    let tau: Vec<usize> = (0..n).map(|i| if i < l { (i + 1) % l } else { i }).collect();
    vec![
        Permutation::new(sigma).expect("tribe rotation is a bijection"),
        Permutation::new(tau).expect("member rotation is a bijection"),
    ]
}
