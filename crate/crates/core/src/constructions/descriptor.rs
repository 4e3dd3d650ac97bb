use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::hypercube::{SharedFunction, Ternary};

use super::{Bribable, Bribed, Constant, Dictator, Majority, Parity, TieRule, Tribes, TribesParams};

/// Serializable description of a function family member.
///
/// ```json
/// {"family": "tribes", "l": 2, "k": 3}
/// {"family": "bribed", "l": 12, "k": 1024}
/// {"family": "majority", "n": 5, "tie_rule": "error"}
/// ```
///
/// `bribed` without a `base` is majority (tie rule `plus`) bribed by the
/// tribes bribe on the same `(l, k)` layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionDescriptor {
    Tribes {
        l: usize,
        k: usize,
    },
    Bribable {
        l: usize,
        k: usize,
    },
    Majority {
        n: usize,
        #[serde(default)]
        tie_rule: TieRule,
    },
    Bribed {
        l: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Box<FunctionDescriptor>>,
    },
    Dictator {
        n: usize,
        #[serde(default)]
        index: usize,
    },
    Parity {
        n: usize,
    },
    Constant {
        n: usize,
        value: i8,
    },
}

impl FunctionDescriptor {
    pub fn arity(&self) -> Result<usize> {
        Ok(match self {
            FunctionDescriptor::Tribes { l, k } | FunctionDescriptor::Bribable { l, k } | FunctionDescriptor::Bribed { l, k, .. } => {
                TribesParams::new(*l, *k)?.n()
            }
            FunctionDescriptor::Majority { n, .. }
            | FunctionDescriptor::Dictator { n, .. }
            | FunctionDescriptor::Parity { n }
            | FunctionDescriptor::Constant { n, .. } => *n,
        })
    }

    /// The tribes layout, for families built on one.
    pub fn tribes_params(&self) -> Option<TribesParams> {
        match self {
            FunctionDescriptor::Tribes { l, k } | FunctionDescriptor::Bribable { l, k } | FunctionDescriptor::Bribed { l, k, .. } => {
                TribesParams::new(*l, *k).ok()
            }
            _ => None,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            FunctionDescriptor::Tribes { .. } => "tribes",
            FunctionDescriptor::Bribable { .. } => "bribable",
            FunctionDescriptor::Majority { .. } => "majority",
            FunctionDescriptor::Bribed { .. } => "bribed",
            FunctionDescriptor::Dictator { .. } => "dictator",
            FunctionDescriptor::Parity { .. } => "parity",
            FunctionDescriptor::Constant { .. } => "constant",
        }
    }

    pub fn build(&self) -> Result<SharedFunction> {
        Ok(match self {
            FunctionDescriptor::Tribes { l, k } => Arc::new(Tribes::new(TribesParams::new(*l, *k)?)),
            FunctionDescriptor::Bribable { l, k } => Arc::new(Bribable::new(TribesParams::new(*l, *k)?)),
            FunctionDescriptor::Majority { n, tie_rule } => Arc::new(Majority::new(*n, *tie_rule)?),
            FunctionDescriptor::Bribed { l, k, base } => {
                let params = TribesParams::new(*l, *k)?;
                let base = match base {
                    Some(d) => d.build()?,
                    None => Arc::new(Majority::new(params.n(), TieRule::Plus)?),
                };
                Arc::new(Bribed::new(base, Arc::new(Bribable::new(params)))?)
            }
            FunctionDescriptor::Dictator { n, index } => Arc::new(Dictator::new(*n, *index)?),
            FunctionDescriptor::Parity { n } => Arc::new(Parity::new(*n)),
            FunctionDescriptor::Constant { n, value } => {
                let v = Ternary::from_i8(*value)
                    .ok_or_else(|| LabError::InvalidParameter(format!("constant value {value} not in {{-1, 0, 1}}")))?;
                Arc::new(Constant::new(*n, v))
            }
        })
    }

    /// The same family re-instantiated on another tribes layout; families
    /// without a layout are sized to `l·k`.
    pub fn with_layout(&self, params: TribesParams) -> FunctionDescriptor {
        let (l, k, n) = (params.l(), params.k(), params.n());
        match self {
            FunctionDescriptor::Tribes { .. } => FunctionDescriptor::Tribes { l, k },
            FunctionDescriptor::Bribable { .. } => FunctionDescriptor::Bribable { l, k },
            FunctionDescriptor::Bribed { base, .. } => FunctionDescriptor::Bribed {
                l,
                k,
                base: base.as_ref().map(|b| Box::new(b.resized(n))),
            },
            other => other.resized(n),
        }
    }

    fn resized(&self, n: usize) -> FunctionDescriptor {
        match self {
            FunctionDescriptor::Majority { tie_rule, .. } => FunctionDescriptor::Majority { n, tie_rule: *tie_rule },
            FunctionDescriptor::Dictator { index, .. } => FunctionDescriptor::Dictator { n, index: *index },
            FunctionDescriptor::Parity { .. } => FunctionDescriptor::Parity { n },
            FunctionDescriptor::Constant { value, .. } => FunctionDescriptor::Constant { n, value: *value },
            other => other.clone(),
        }
    }
}
