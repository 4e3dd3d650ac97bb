//! Command-line harness for `pivotal-lab`: exact and Monte Carlo analyses,
//! dynamics sweeps, the parameter schedule, and the reproduce suites.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod reproduce;

use cli::{Cli, Command};
use error::{CliError, CliResult};
use output::Sink;

/// Runs a parsed command line inside a pool of the requested size.
pub fn execute(cli: Cli) -> CliResult<()> {
    let (args, suite) = match &cli.command {
        Command::Exact(a) | Command::Mc(a) | Command::Dynamics(a) | Command::Schedule(a) => (a, None),
        Command::Reproduce { suite, args } => (args, Some(*suite)),
    };
    let cfg = args.resolve()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| {
        if let Some(suite) = suite {
            return reproduce::run(suite, &cfg);
        }
        let tables = match &cli.command {
            Command::Exact(_) => commands::exact::run(&cfg)?,
            Command::Mc(_) => commands::mc::run(&cfg)?,
            Command::Dynamics(_) => commands::dynamics::run(&cfg)?,
            Command::Schedule(_) => commands::schedule::run(&cfg)?,
            Command::Reproduce { .. } => unreachable!("handled above"),
        };
        Sink::new(&cfg).write_all(&tables)
    })
}
