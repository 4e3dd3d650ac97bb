use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructions::FunctionDescriptor;
use crate::dynamics::{IncrementalSession, RecomputeSession};
use crate::error::{LabError, Result};
use crate::hypercube::Configuration;

/// Output of a (possibly ternary) Boolean function. Ordered `Minus < Zero < Plus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ternary {
    Minus,
    Zero,
    Plus,
}

impl Ternary {
    pub const ALL: [Ternary; 3] = [Ternary::Minus, Ternary::Zero, Ternary::Plus];

    #[inline]
    pub fn to_i8(self) -> i8 {
        match self {
            Ternary::Minus => -1,
            Ternary::Zero => 0,
            Ternary::Plus => 1,
        }
    }

    #[inline]
    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(Ternary::Minus),
            0 => Some(Ternary::Zero),
            1 => Some(Ternary::Plus),
            _ => None,
        }
    }

    #[inline]
    pub fn from_bool(plus: bool) -> Self {
        if plus {
            Ternary::Plus
        } else {
            Ternary::Minus
        }
    }

    /// `0` for `Minus`, `1` for `Zero`, `2` for `Plus`; handy for table indexing.
    #[inline]
    pub fn index(self) -> usize {
        (self.to_i8() + 1) as usize
    }

    #[inline]
    pub fn negate(self) -> Self {
        match self {
            Ternary::Minus => Ternary::Plus,
            Ternary::Zero => Ternary::Zero,
            Ternary::Plus => Ternary::Minus,
        }
    }
}

impl fmt::Display for Ternary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_i8())
    }
}

/// Declared value set of a function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Codomain {
    /// `{-1, +1}`
    Boolean,
    /// `{0, 1}`
    ZeroOne,
    /// `{-1, 0, +1}`
    Ternary,
}

impl Codomain {
    pub fn admits(self, v: Ternary) -> bool {
        match self {
            Codomain::Boolean => v != Ternary::Zero,
            Codomain::ZeroOne => v != Ternary::Minus,
            Codomain::Ternary => true,
        }
    }
}

/// The evaluation contract shared by every function family.
///
/// `eval` must be deterministic and total on configurations of length
/// `arity()`. It is not required to check the length; use [`evaluate`] at
/// API boundaries.
pub trait BooleanFunction: Send + Sync + fmt::Debug {
    fn arity(&self) -> usize;

    fn eval(&self, c: &Configuration) -> Ternary;

    fn codomain(&self) -> Codomain;

    /// Advisory only; [`crate::hypercube::check_monotone`] is the authority.
    fn declared_monotone(&self) -> bool {
        false
    }

    /// An incremental evaluator for dynamics. The default recomputes from
    /// scratch after every update.
    fn session(&self) -> Box<dyn IncrementalSession + '_> {
        Box::new(RecomputeSession::new(self))
    }

    fn descriptor(&self) -> Option<FunctionDescriptor> {
        None
    }
}

pub type SharedFunction = Arc<dyn BooleanFunction>;

/// Checked evaluation.
pub fn evaluate(f: &dyn BooleanFunction, c: &Configuration) -> Result<Ternary> {
    check_arity(f, c)?;
    Ok(f.eval(c))
}

pub(crate) fn check_arity(f: &dyn BooleanFunction, c: &Configuration) -> Result<()> {
    if f.arity() != c.len() {
        Err(LabError::ArityMismatch { expected: f.arity(), found: c.len() })
    } else {
        Ok(())
    }
}
