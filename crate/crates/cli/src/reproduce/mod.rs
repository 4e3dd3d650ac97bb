//! Canned acceptance batteries. Each suite writes its data tables,
//! `verdict.json` and `summary.txt` into one directory, and reports the
//! wall time of every check on stderr as
//! `timing suite=<suite> check=<name> criterion=<c> seconds=<s>`.

mod bribable;
mod census;
mod marginals;
mod stability;
mod volatility;

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use crate::cli::Suite;
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Sink, Table, VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub criterion: u8,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub suite: String,
    pub version: String,
    pub seed: u64,
    pub config: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Collects checks and tables for one suite.
pub struct Runner {
    suite: &'static str,
    checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl Runner {
    fn new(suite: &'static str) -> Self {
        Runner { suite, checks: Vec::new(), tables: Vec::new() }
    }

    /// Runs one named check. An error inside the check fails it rather than
    /// the suite, so the remaining checks still run.
    pub fn check<F>(&mut self, name: &str, criterion: u8, body: F)
    where
        F: FnOnce(&mut Vec<Table>) -> CliResult<(bool, String)>,
    {
        let start = Instant::now();
        let (passed, detail) = match body(&mut self.tables) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        eprintln!(
            "timing suite={} check={name} criterion={criterion} seconds={:.3}",
            self.suite,
            start.elapsed().as_secs_f64()
        );
        self.checks.push(Check { name: name.to_string(), criterion, passed, detail });
    }

    /// Records work that produces tables but no verdict; its time counts
    /// towards `criterion` (0 for data-only output).
    pub fn data<F>(&mut self, name: &str, criterion: u8, body: F) -> CliResult<()>
    where
        F: FnOnce(&mut Vec<Table>) -> CliResult<()>,
    {
        let start = Instant::now();
        body(&mut self.tables)?;
        eprintln!(
            "timing suite={} check={name} criterion={criterion} seconds={:.3}",
            self.suite,
            start.elapsed().as_secs_f64()
        );
        Ok(())
    }
}

pub fn out_dir(suite: Suite, cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("reproduce-{}", suite.name())))
}

fn summary(v: &Verdict) -> String {
    let mut s = format!("pivotal-lab {} reproduce {} seed={} config={}\n", v.version, v.suite, v.seed, v.config);
    for c in &v.checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!("{mark} [{}] {}: {}\n", c.criterion, c.name, c.detail));
    }
    let failed = v.checks.iter().filter(|c| !c.passed).count();
    s.push_str(&format!("{} of {} checks passed\n", v.checks.len() - failed, v.checks.len()));
    s
}

pub fn run(suite: Suite, cfg: &ExperimentConfig) -> CliResult<()> {
    let mut runner = Runner::new(suite.name());
    match suite {
        Suite::PivotalAbundance => census::abundance(&mut runner, cfg)?,
        Suite::Sandwich => census::sandwich(&mut runner, cfg)?,
        Suite::Bribable => bribable::run(&mut runner, cfg)?,
        Suite::Marginals => marginals::run(&mut runner, cfg)?,
        Suite::Stability => stability::run(&mut runner, cfg)?,
        Suite::Volatility => volatility::run(&mut runner, cfg)?,
    }
    let dir = out_dir(suite, cfg);
    let sink = Sink::to_dir(cfg, &dir);
    sink.write_all(&runner.tables)?;
    let verdict = Verdict {
        suite: suite.name().to_string(),
        version: VERSION.to_string(),
        seed: cfg.seed,
        config: cfg.hash(),
        passed: runner.checks.iter().all(|c| c.passed),
        checks: runner.checks,
    };
    sink.write_file("verdict.json", &(serde_json::to_string_pretty(&verdict)? + "\n"))?;
    let text = summary(&verdict);
    sink.write_file("summary.txt", &text)?;
    print!("{text}");
    let failed: Vec<String> = verdict.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed))
    }
}

/// `last − first > 4σ` and no step falls by more than `4σ`, where `σ` is
/// the combined stderr of the two points compared.
pub fn increases(points: &[(f64, f64)]) -> (bool, String) {
    let se = |a: (f64, f64), b: (f64, f64)| (a.1 * a.1 + b.1 * b.1).sqrt();
    let (first, last) = (points[0], points[points.len() - 1]);
    let rise = last.0 - first.0;
    let sep = rise / se(first, last);
    let worst_drop = points
        .windows(2)
        .map(|w| (w[0].0 - w[1].0) / se(w[0], w[1]))
        .fold(f64::NEG_INFINITY, f64::max);
    let ok = sep > 4.0 && worst_drop <= 4.0;
    (ok, format!("rise {rise:.6} = {sep:.2} sigma, worst step drop {worst_drop:.2} sigma"))
}
