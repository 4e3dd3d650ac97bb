use pivotal_lab::constructions::doubling_k;

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::Table;
use crate::row;

pub fn run(cfg: &ExperimentConfig) -> CliResult<Vec<Table>> {
    let mut cfg = cfg.clone();
    if cfg.k.is_none() && cfg.j.is_none() {
        cfg.k = Some(doubling_k(10..=18));
    }
    let rule = cfg.threshold_rule();
    let mut out = Table::new(
        "schedule",
        &["index", "k", "l", "q0", "mu", "gap_full", "gap_pivotal", "q0_flag", "mu_flag", "threshold"],
    );
    for e in cfg.schedule()? {
        out.push(row![e.index, e.k, e.l, e.q0, e.mu, e.gap_full, e.gap_pivotal, e.q0_flag, e.mu_flag, e.threshold(rule)]);
    }
    Ok(vec![out])
}
