use pivotal_lab::constructions::TribesParams;
use pivotal_lab::dynamics::{bound_verdict, pivotal_at_most, run_trials, BoundVerdict, DynamicsConfig, VolatilityEntry};
use pivotal_lab::RandomStream;
use serde::Serialize;

use crate::commands::mc::thresholds_for;
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};
use crate::row;

pub const DEFAULT_TRIALS: u64 = 10_000;

/// Lane offset for the pivotal-count samples of the bound check.
const BOUND_LANE: u64 = 1 << 20;

const REPORTS: [&str; 4] = ["volatility", "bound", "histogram", "all"];

pub const COLUMNS: [&str; 14] = [
    "family",
    "k",
    "l",
    "n",
    "semantics",
    "duration",
    "trials",
    "p_c0",
    "stderr",
    "mean_C",
    "q50",
    "q90",
    "seed",
    "mean_C_stderr",
];

pub const BOUND_COLUMNS: [&str; 14] = [
    "family",
    "k",
    "l",
    "n",
    "threshold",
    "p_c0",
    "p_c0_stderr",
    "p_few_pivotal",
    "p_few_pivotal_stderr",
    "epsilon",
    "bound",
    "bound_upper",
    "margin",
    "holds",
];

pub fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn layout_cells(layout: Option<TribesParams>) -> [Cell; 2] {
    match layout {
        Some(p) => [Cell::from(p.k()), Cell::from(p.l())],
        None => [Cell::Empty, Cell::Empty],
    }
}

pub fn volatility_row(table: &mut Table, e: &VolatilityEntry, layout: Option<TribesParams>, cfg: &DynamicsConfig, seed: u64) {
    let [k, l] = layout_cells(layout);
    let mut r = vec![Cell::from(e.family.as_str()), k, l];
    r.extend(row![
        e.n,
        label(&cfg.semantics),
        cfg.duration,
        e.tally.trials,
        e.p_c0.point,
        e.p_c0.stderr,
        e.mean_c.point,
        e.q50,
        e.q90,
        seed,
        e.mean_c.stderr
    ]);
    table.push(r);
}

pub fn bound_row(table: &mut Table, family: &str, layout: Option<TribesParams>, n: usize, v: &BoundVerdict) {
    let [k, l] = layout_cells(layout);
    let mut r = vec![Cell::from(family), k, l];
    r.extend(row![
        n,
        v.threshold,
        v.p_c0.point,
        v.p_c0.stderr,
        v.p_few_pivotal.point,
        v.p_few_pivotal.stderr,
        v.epsilon,
        v.bound,
        v.bound_upper,
        v.margin,
        v.holds()
    ]);
    table.push(r);
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Vec<Table>> {
    let report = cfg.report.as_deref().unwrap_or("volatility");
    if !REPORTS.contains(&report) {
        return Err(CliError::Usage(format!("dynamics report must be one of {}, got {report}", REPORTS.join(", "))));
    }
    let dcfg = cfg.dynamics(DEFAULT_TRIALS);
    dcfg.validate()?;
    let family = cfg.family.ok_or_else(|| CliError::Usage("--family is required".into()))?;
    let units: Vec<(Option<TribesParams>, _)> = if family.uses_layout() {
        cfg.layouts()?.into_iter().map(|p| (Some(p), cfg.descriptor_on(family, p.l(), p.k()))).collect()
    } else {
        vec![(None, cfg.descriptor()?)]
    };
    let wants = |r: &str| report == r || report == "all";
    if wants("bound") && !family.uses_layout() && cfg.thresholds.is_none() {
        return Err(CliError::Usage("the bound report needs --thresholds for families without a tribes layout".into()));
    }

    let base = RandomStream::new(cfg.seed, 0);
    let mut vol = Table::new("dynamics", &COLUMNS);
    let mut bound = Table::new("bound", &BOUND_COLUMNS);
    let mut hist = Table::new("histogram", &["family", "k", "l", "n", "changes", "count", "probability"]);
    for (i, (layout, d)) in units.iter().enumerate() {
        let f = d.build()?;
        let lane = base.lane(i as u64);
        let tally = run_trials(f.as_ref(), &dcfg, lane)?;
        let e = VolatilityEntry::from_tally(d.family_name(), layout.map(|p| p.k() as u64), layout.map(|p| p.l() as u32), f.arity(), tally, lane);
        volatility_row(&mut vol, &e, *layout, &dcfg, cfg.seed);
        if wants("histogram") {
            for (c, pr) in e.distribution() {
                let [k, l] = layout_cells(*layout);
                let mut r = vec![Cell::from(d.family_name()), k, l];
                r.extend(row![e.n, c, e.tally.histogram[&c], pr]);
                hist.push(r);
            }
        }
        if wants("bound") {
            let a = match layout {
                Some(p) => thresholds_for(cfg, *p)[0],
                None => cfg.thresholds.as_ref().expect("checked above")[0],
            };
            let samples = cfg.samples.unwrap_or(dcfg.trials);
            let few = pivotal_at_most(d, a, dcfg.p, samples, base.lane(BOUND_LANE + i as u64))?;
            bound_row(&mut bound, d.family_name(), *layout, e.n, &bound_verdict(e.p_c0, few, a));
        }
    }
    let mut tables = vec![vol];
    if wants("bound") {
        tables.push(bound);
    }
    if wants("histogram") {
        tables.push(hist);
    }
    Ok(tables)
}
