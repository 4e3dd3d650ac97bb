//! Experiment configuration.
//!
//! The canonical form is JSON. A flat `key = value` form is also accepted,
//! one pair per line, `#` starting a comment; list values are written
//! `a,b,c` and integer lists also take ranges `a..b` (exclusive) and
//! `a..=b` (inclusive). Command-line flags use the same keys and override
//! the file.

use std::fmt;
use std::path::{Path, PathBuf};

use pivotal_lab::constructions::{
    doubling_k, schedule, schedule_l, tribes_zero_probability, FunctionDescriptor, Rounding, ScheduleEntry, ThresholdRule,
    TieRule, TribesParams,
};
use pivotal_lab::dynamics::{DynamicsConfig, Semantics};
use pivotal_lab::montecarlo::TribeSampler;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Tribes,
    Bribable,
    Bribed,
    Majority,
    Dictator,
    Parity,
    Constant,
}

impl Family {
    pub fn uses_layout(self) -> bool {
        matches!(self, Family::Tribes | Family::Bribable | Family::Bribed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Threshold rule in its flat spelling: `half-mean`, `sqrt-mean` or an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdSpec(pub ThresholdRule);

impl Serialize for ThresholdSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            ThresholdRule::HalfMean => s.serialize_str("half-mean"),
            ThresholdRule::SqrtMean => s.serialize_str("sqrt-mean"),
            ThresholdRule::Explicit(a) => s.serialize_u64(a),
        }
    }
}

impl<'de> Deserialize<'de> for ThresholdSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) if s == "half-mean" => Ok(ThresholdSpec(ThresholdRule::HalfMean)),
            Value::String(s) if s == "sqrt-mean" => Ok(ThresholdSpec(ThresholdRule::SqrtMean)),
            Value::Number(n) if n.is_u64() => Ok(ThresholdSpec(ThresholdRule::Explicit(n.as_u64().unwrap()))),
            other => Err(de::Error::custom(format!("threshold rule must be half-mean, sqrt-mean or an integer, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Tribe size; overrides the schedule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, deserialize_with = "int_list", skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<u64>>,
    /// Exponents: `k = 2^j`.
    #[serde(default, deserialize_with = "int_list", skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<u64>>,
    #[serde(default)]
    pub rounding: Rounding,
    #[serde(default = "half")]
    pub p: f64,
    #[serde(default, deserialize_with = "float_list", skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<String>,
    #[serde(default, deserialize_with = "int_list", skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_rule: Option<ThresholdSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<TribeSampler>,
    #[serde(default)]
    pub semantics: Semantics,
    #[serde(default = "one")]
    pub duration: f64,
    #[serde(default)]
    pub tie_rule: TieRule,
    #[serde(default)]
    pub index: usize,
    #[serde(default = "plus_one")]
    pub value: i8,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn half() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

fn plus_one() -> i8 {
    1
}

pub const DEFAULT_SEED: u64 = 20_170_601;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_value(Value::Object(Map::new())).expect("all fields default")
    }
}

fn parse_int_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = tok.split_once("..=") {
            let (a, b) = (parse_u64(a)?, parse_u64(b)?);
            out.extend(a..=b);
        } else if let Some((a, b)) = tok.split_once("..") {
            let (a, b) = (parse_u64(a)?, parse_u64(b)?);
            out.extend(a..b);
        } else {
            out.push(parse_u64(tok)?);
        }
    }
    if out.is_empty() {
        return Err(format!("empty list {s:?}"));
    }
    Ok(out)
}

fn parse_u64(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Some(e) = s.strip_prefix("2^") {
        let e: u32 = e.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        return 1u64.checked_shl(e).ok_or_else(|| format!("{s} overflows"));
    }
    s.parse().map_err(|_| format!("not a non-negative integer: {s:?}"))
}

fn int_list<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<u64>>, D::Error> {
    let v = Value::deserialize(d)?;
    let list = match &v {
        Value::Null => return Ok(None),
        Value::Number(n) => vec![n.as_u64().ok_or_else(|| de::Error::custom(format!("not a non-negative integer: {n}")))?],
        Value::String(s) => parse_int_list(s).map_err(de::Error::custom)?,
        Value::Array(items) => items
            .iter()
            .map(|x| x.as_u64().ok_or_else(|| de::Error::custom(format!("not a non-negative integer: {x}"))))
            .collect::<Result<_, _>>()?,
        other => return Err(de::Error::custom(format!("expected an integer list, got {other}"))),
    };
    Ok(Some(list))
}

fn float_list<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
    let v = Value::deserialize(d)?;
    let bad = |x: &dyn fmt::Display| de::Error::custom(format!("not a number: {x}"));
    let list = match &v {
        Value::Null => return Ok(None),
        Value::Number(n) => vec![n.as_f64().ok_or_else(|| bad(n))?],
        Value::String(s) => s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| bad(&t)))
            .collect::<Result<_, _>>()?,
        Value::Array(items) => items.iter().map(|x| x.as_f64().ok_or_else(|| bad(x))).collect::<Result<_, _>>()?,
        other => return Err(bad(other)),
    };
    if list.is_empty() {
        return Err(de::Error::custom("empty epsilon list"));
    }
    Ok(Some(list))
}

/// A flat value: JSON if it parses as JSON, otherwise a bare string.
pub fn flat_value(raw: &str) -> Value {
    let raw = raw.trim();
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Parses `key = value` lines.
pub fn parse_flat(text: &str) -> CliResult<Map<String, Value>> {
    let mut map = Map::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", no + 1)))?;
        let key = key.trim().replace('-', "_");
        if map.insert(key.clone(), flat_value(value)).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key {key}", no + 1)));
        }
    }
    Ok(map)
}

/// Reads a config file; JSON if it starts with `{`, flat otherwise.
pub fn read_config_file(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(m)) => Ok(m),
            Ok(_) => Err(CliError::Usage("config JSON must be an object".into())),
            Err(e) => Err(CliError::Usage(format!("config {}: {e}", path.display()))),
        }
    } else {
        parse_flat(&text)
    }
}

impl ExperimentConfig {
    /// File values first, then flag values on top.
    pub fn assemble(file: Map<String, Value>, flags: Map<String, Value>) -> CliResult<Self> {
        let mut merged = file;
        merged.extend(flags);
        let cfg: ExperimentConfig =
            serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        if !(self.p > 0.0 && self.p < 1.0) {
            return usage(format!("p must lie in (0, 1), got {}", self.p));
        }
        if let Some(eps) = &self.epsilon {
            if let Some(e) = eps.iter().find(|e| !(0.0..=1.0).contains(*e)) {
                return usage(format!("epsilon must lie in [0, 1], got {e}"));
            }
        }
        if self.samples == Some(0) {
            return usage("samples must be positive".into());
        }
        if self.trials == Some(0) {
            return usage("trials must be positive".into());
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return usage(format!("duration must be positive, got {}", self.duration));
        }
        if self.threads == Some(0) {
            return usage("threads must be positive".into());
        }
        if self.k.is_some() && self.j.is_some() {
            return usage("give k or j, not both".into());
        }
        if let Some(j) = &self.j {
            if let Some(bad) = j.iter().find(|&&j| !(2..=40).contains(&j)) {
                return usage(format!("j must lie in [2, 40], got {bad}"));
            }
        }
        if let Some(k) = &self.k {
            if k.contains(&0) {
                return usage("k must be positive".into());
            }
        }
        if !(-1..=1).contains(&self.value) {
            return usage(format!("constant value must be -1, 0 or 1, got {}", self.value));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, without `threads` and `out`.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.threads = None;
        canonical.out = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn epsilons(&self, default: &[f64]) -> Vec<f64> {
        self.epsilon.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn threshold_rule(&self) -> ThresholdRule {
        self.threshold_rule.map(|t| t.0).unwrap_or_default()
    }

    pub fn dynamics(&self, default_trials: u64) -> DynamicsConfig {
        DynamicsConfig { duration: self.duration, semantics: self.semantics, p: self.p, trials: self.trials.unwrap_or(default_trials) }
    }

    /// Requested `k` values: explicit, or `2^j`.
    pub fn k_values(&self) -> Option<Vec<u64>> {
        if let Some(k) = &self.k {
            return Some(k.clone());
        }
        self.j.as_ref().map(|js| js.iter().map(|&j| 1u64 << j).collect())
    }

    /// Schedule points for the requested `k`, with `l` overridden if given.
    pub fn schedule(&self) -> CliResult<Vec<ScheduleEntry>> {
        let ks = self.k_values().ok_or_else(|| CliError::Usage("a schedule needs k or j".into()))?;
        let mut entries = schedule(&ks, self.rounding)?;
        if let Some(l) = self.l {
            for e in &mut entries {
                e.l = l as u32;
                e.q0 = tribes_zero_probability(e.l, e.k);
                e.mu = e.k as f64 * l as f64 * (-(l as f64)).exp2();
                e.gap_full = (e.k as f64).log2() - l as f64;
                e.gap_pivotal = e.gap_full + (l as f64).log2();
            }
            for i in 1..entries.len() {
                entries[i].q0_flag = entries[i].q0 <= entries[i - 1].q0;
                entries[i].mu_flag = entries[i].mu <= entries[i - 1].mu;
            }
        }
        for (i, e) in entries.iter_mut().enumerate() {
            e.index = i;
        }
        Ok(entries)
    }

    /// The function described by the config, on an explicit layout when
    /// the family needs one.
    pub fn descriptor(&self) -> CliResult<FunctionDescriptor> {
        let family = self.family.ok_or_else(|| CliError::Usage("--family is required".into()))?;
        if family.uses_layout() {
            let params = self.single_layout()?;
            return Ok(self.descriptor_on(family, params.l(), params.k()));
        }
        let n = self.n.ok_or_else(|| CliError::Usage(format!("family {family:?} needs n").to_lowercase()))?;
        Ok(self.sized_descriptor(family, n))
    }

    pub fn descriptor_on(&self, family: Family, l: usize, k: usize) -> FunctionDescriptor {
        match family {
            Family::Tribes => FunctionDescriptor::Tribes { l, k },
            Family::Bribable => FunctionDescriptor::Bribable { l, k },
            Family::Bribed => FunctionDescriptor::Bribed { l, k, base: None },
            other => self.sized_descriptor(other, l * k),
        }
    }

    fn sized_descriptor(&self, family: Family, n: usize) -> FunctionDescriptor {
        match family {
            Family::Majority => FunctionDescriptor::Majority { n, tie_rule: self.tie_rule },
            Family::Dictator => FunctionDescriptor::Dictator { n, index: self.index },
            Family::Parity => FunctionDescriptor::Parity { n },
            Family::Constant => FunctionDescriptor::Constant { n, value: self.value },
            Family::Tribes | Family::Bribable | Family::Bribed => unreachable!("layout families are sized by (l, k)"),
        }
    }

    /// Tribes layouts for the requested `k`, `l` explicit or from the schedule.
    pub fn layouts(&self) -> CliResult<Vec<TribesParams>> {
        let ks = self.k_values().ok_or_else(|| CliError::Usage("tribes layouts need k (or j)".into()))?;
        ks.iter()
            .map(|&k| {
                let l = match self.l {
                    Some(l) => l,
                    None => schedule_l(k, self.rounding)? as usize,
                };
                let k = usize::try_from(k).map_err(|_| CliError::Usage("k too large".into()))?;
                Ok(TribesParams::new(l, k)?)
            })
            .collect()
    }

    /// Exactly one `(l, k)`.
    pub fn single_layout(&self) -> CliResult<TribesParams> {
        let layouts = self.layouts()?;
        match layouts.as_slice() {
            [one] => Ok(*one),
            _ => Err(CliError::Usage(format!("expected a single k, got {}", layouts.len()))),
        }
    }
}

/// `k = 2^j` for `j` in `range`.
pub fn doubling(range: std::ops::RangeInclusive<u32>) -> Vec<u64> {
    doubling_k(range)
}
