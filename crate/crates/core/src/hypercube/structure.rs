//! Structural checkers: monotonicity by edge scan, invariance under
//! coordinate permutations, and orbit closure of a generator set.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::exact::TruthTable;
use crate::hypercube::function::check_arity;
use crate::hypercube::{BooleanFunction, Configuration, Ternary};
use crate::rng::RandomStream;

/// Default cap on exhaustive scans; an edge scan at n = 22 is ~4.6e7 lookups.
pub const EXHAUSTIVE_CAP: usize = 22;

/// A bijection on `{0, …, n-1}` given by its one-line image array.
///
/// Acting on a configuration it produces `c ∘ σ`, i.e. coordinate `i` of the
/// result is coordinate `σ(i)` of the input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || seen[j] {
                return Err(LabError::InvalidParameter(format!("{image:?} is not a permutation")));
            }
            seen[j] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { image: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply_index(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `c ∘ σ`.
    pub fn act(&self, c: &Configuration) -> Result<Configuration> {
        if c.len() != self.len() {
            return Err(LabError::ArityMismatch { expected: self.len(), found: c.len() });
        }
        let mut out = Configuration::all_minus(c.len());
        for (i, &j) in self.image.iter().enumerate() {
            if c.is_plus(j) {
                out.set(i, true);
            }
        }
        Ok(out)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = LabError;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.image
    }
}

/// An edge `c -> c^i` with `c_i = -1` along which `f` decreases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneViolation {
    pub lower: Configuration,
    pub coordinate: usize,
    pub lower_value: Ternary,
    pub upper_value: Ternary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneReport {
    pub monotone: bool,
    pub violation: Option<MonotoneViolation>,
}

/// Exhaustive edge scan: `f` is monotone increasing iff every hypercube edge
/// `c -> c^i` with `c_i = -1` satisfies `f(c^i) >= f(c)`.
pub fn check_monotone(f: &dyn BooleanFunction) -> Result<MonotoneReport> {
    check_monotone_capped(f, EXHAUSTIVE_CAP)
}

pub fn check_monotone_capped(f: &dyn BooleanFunction, cap: usize) -> Result<MonotoneReport> {
    let table = TruthTable::build_capped(f, cap)?;
    let n = table.arity();
    let values = table.values();
    for code in 0..values.len() {
        let lo = values[code];
        for i in 0..n {
            let bit = 1usize << i;
            if code & bit == 0 && values[code | bit] < lo {
                return Ok(MonotoneReport {
                    monotone: false,
                    violation: Some(MonotoneViolation {
                        lower: Configuration::from_code(n, code as u64),
                        coordinate: i,
                        lower_value: Ternary::from_i8(lo).expect("table holds ternary values"),
                        upper_value: Ternary::from_i8(values[code | bit]).expect("table holds ternary values"),
                    }),
                });
            }
        }
    }
    Ok(MonotoneReport { monotone: true, violation: None })
}

/// Outcome of a sampled monotonicity spot check. Absence of a violation in a
/// sample proves nothing, hence `Inconclusive` rather than `Monotone`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpotCheck {
    Violation(MonotoneViolation),
    Inconclusive { edges_checked: u64 },
}

/// Random edge spot check for arities over the exhaustive cap. Sample `s`
/// uses stream `base + s`.
pub fn spot_check_monotone(f: &dyn BooleanFunction, samples: u64, base: RandomStream) -> SpotCheck {
    use rand::Rng;
    let n = f.arity();
    if n == 0 {
        return SpotCheck::Inconclusive { edges_checked: 0 };
    }
    for s in 0..samples {
        let mut rng = base.offset(s).rng();
        let mut c = Configuration::random(n, 0.5, &mut rng).expect("p = 1/2 is valid");
        let i = rng.random_range(0..n);
        c.set(i, false);
        let lo = f.eval(&c);
        c.set(i, true);
        let hi = f.eval(&c);
        if hi < lo {
            c.set(i, false);
            return SpotCheck::Violation(MonotoneViolation { lower: c, coordinate: i, lower_value: lo, upper_value: hi });
        }
    }
    SpotCheck::Inconclusive { edges_checked: samples }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvarianceMode {
    /// All `2^n` configurations; requires `n <= cap`.
    Exhaustive { cap: usize },
    /// `count` random configurations, sample `s` on stream `base + s`.
    Sampled { count: u64, base: RandomStream },
}

impl Default for InvarianceMode {
    fn default() -> Self {
        InvarianceMode::Exhaustive { cap: EXHAUSTIVE_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// A configuration `c` and generator index `g` with `f(c ∘ σ_g) != f(c)`.
    pub counterexample: Option<(Configuration, usize)>,
    pub configurations_checked: u64,
}

/// Checks `f(c ∘ σ) = f(c)` for every generator and every tested `c`.
pub fn check_invariance(f: &dyn BooleanFunction, generators: &[Permutation], mode: InvarianceMode) -> Result<InvarianceReport> {
    let n = f.arity();
    for g in generators {
        if g.len() != n {
            return Err(LabError::ArityMismatch { expected: n, found: g.len() });
        }
    }
    let check_one = |c: &Configuration| -> Result<Option<usize>> {
        check_arity(f, c)?;
        let v = f.eval(c);
        for (gi, g) in generators.iter().enumerate() {
            if f.eval(&g.act(c)?) != v {
                return Ok(Some(gi));
            }
        }
        Ok(None)
    };
    match mode {
        InvarianceMode::Exhaustive { cap } => {
            if n > cap {
                return Err(LabError::CapExceeded { n, cap });
            }
            let total = 1u64 << n;
            for code in 0..total {
                let c = Configuration::from_code(n, code);
                if let Some(gi) = check_one(&c)? {
                    return Ok(InvarianceReport { invariant: false, counterexample: Some((c, gi)), configurations_checked: code + 1 });
                }
            }
            Ok(InvarianceReport { invariant: true, counterexample: None, configurations_checked: total })
        }
        InvarianceMode::Sampled { count, base } => {
            for s in 0..count {
                let mut rng = base.offset(s).rng();
                let c = Configuration::random(n, 0.5, &mut rng)?;
                if let Some(gi) = check_one(&c)? {
                    return Ok(InvarianceReport { invariant: false, counterexample: Some((c, gi)), configurations_checked: s + 1 });
                }
            }
            Ok(InvarianceReport { invariant: true, counterexample: None, configurations_checked: count })
        }
    }
}

/// Breadth-first closure of `start` under the generators, sorted.
pub fn orbit(generators: &[Permutation], n: usize, start: usize) -> Result<Vec<usize>> {
    if start >= n {
        return Err(LabError::IndexOutOfRange { index: start, n });
    }
    for g in generators {
        if g.len() != n {
            return Err(LabError::ArityMismatch { expected: n, found: g.len() });
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let j = g.apply_index(i);
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok((0..n).filter(|&i| seen[i]).collect())
}

/// The group generated by `generators` acts transitively on `{0, …, n-1}`.
pub fn is_transitive(generators: &[Permutation], n: usize) -> Result<bool> {
    if n == 0 {
        return Ok(true);
    }
    Ok(orbit(generators, n, 0)?.len() == n)
}
