use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::config::{flat_value, read_config_file, ExperimentConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "pivotal-lab", version, about = "Exact and Monte Carlo experiments on tribes-bribed Boolean functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exhaustive analysis of a small function.
    Exact(ConfigArgs),
    /// Monte Carlo estimates.
    Mc(ConfigArgs),
    /// Continuous-time dynamics and volatility.
    Dynamics(ConfigArgs),
    /// The parameter schedule and its diagnostics.
    Schedule(ConfigArgs),
    /// Canned acceptance batteries.
    Reproduce {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        args: ConfigArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bribable,
    Stability,
    PivotalAbundance,
    Volatility,
    Marginals,
    Sandwich,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Bribable => "bribable",
            Suite::Stability => "stability",
            Suite::PivotalAbundance => "pivotal-abundance",
            Suite::Volatility => "volatility",
            Suite::Marginals => "marginals",
            Suite::Sandwich => "sandwich",
        }
    }
}

/// Flags shared by every subcommand. Values are parsed like config-file
/// values and override them.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Config file: JSON object or `key = value` lines.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// tribes, bribable, bribed, majority, dictator, parity or constant.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    /// Tribe size; overrides the schedule.
    #[arg(long)]
    pub l: Option<String>,
    /// Tribe counts: `64`, `2^16`, `16,32` or `4..=8`.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Exponents, `k = 2^j`: `10..=14`.
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    /// ceil or round.
    #[arg(long)]
    pub rounding: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Noise levels: `0.05,0.2`.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    /// Report selection; depends on the subcommand.
    #[arg(long)]
    pub report: Option<String>,
    /// Quantity for `mc`.
    #[arg(long)]
    pub quantity: Option<String>,
    /// Pivotal-count thresholds.
    #[arg(long)]
    pub thresholds: Option<String>,
    /// half-mean, sqrt-mean or an integer.
    #[arg(long)]
    pub threshold_rule: Option<String>,
    /// scan or histogram.
    #[arg(long)]
    pub sampler: Option<String>,
    /// flip or resample.
    #[arg(long)]
    pub semantics: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub duration: Option<String>,
    /// plus or error.
    #[arg(long)]
    pub tie_rule: Option<String>,
    /// Dictator coordinate.
    #[arg(long)]
    pub index: Option<String>,
    /// Constant value.
    #[arg(long, allow_hyphen_values = true)]
    pub value: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads; falls back to PIVOTAL_LAB_THREADS.
    #[arg(long, env = "PIVOTAL_LAB_THREADS")]
    pub threads: Option<String>,
    /// Output directory; stdout if absent.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

impl ConfigArgs {
    fn flag_map(&self) -> Map<String, Value> {
        let pairs: [(&str, &Option<String>); 24] = [
            ("family", &self.family),
            ("n", &self.n),
            ("l", &self.l),
            ("k", &self.k),
            ("j", &self.j),
            ("rounding", &self.rounding),
            ("p", &self.p),
            ("epsilon", &self.epsilon),
            ("samples", &self.samples),
            ("trials", &self.trials),
            ("report", &self.report),
            ("quantity", &self.quantity),
            ("thresholds", &self.thresholds),
            ("threshold_rule", &self.threshold_rule),
            ("sampler", &self.sampler),
            ("semantics", &self.semantics),
            ("duration", &self.duration),
            ("tie_rule", &self.tie_rule),
            ("index", &self.index),
            ("value", &self.value),
            ("seed", &self.seed),
            ("threads", &self.threads),
            ("format", &self.format),
            ("out", &None),
        ];
        let mut map: Map<String, Value> =
            pairs.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k.to_string(), flat_value(v)))).collect();
        // Names and list fields stay strings even when they look like JSON.
        for key in ["family", "report", "quantity", "k", "j", "thresholds", "epsilon"] {
            if let Some(raw) = self.raw(key) {
                map.insert(key.to_string(), Value::String(raw.to_string()));
            }
        }
        if let Some(out) = &self.out {
            map.insert("out".into(), Value::String(out.to_string_lossy().into_owned()));
        }
        map
    }

    fn raw(&self, key: &str) -> Option<&str> {
        match key {
            "family" => self.family.as_deref(),
            "report" => self.report.as_deref(),
            "quantity" => self.quantity.as_deref(),
            "k" => self.k.as_deref(),
            "j" => self.j.as_deref(),
            "thresholds" => self.thresholds.as_deref(),
            "epsilon" => self.epsilon.as_deref(),
            _ => None,
        }
    }

    /// The validated configuration: file first, flags on top.
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => Map::new(),
        };
        ExperimentConfig::assemble(file, self.flag_map())
    }
}
