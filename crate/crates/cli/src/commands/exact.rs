use pivotal_lab::exact::{
    exact_disagreement, influence_counts, pivotal_law, pivotal_marginals, spectral_marginals, wht, MarginalOrder, TruthTable,
};
use pivotal_lab::hypercube::Ternary;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::Table;
use crate::row;

pub const DEFAULT_EPSILONS: [f64; 5] = [0.01, 0.05, 0.1, 0.2, 0.5];

const REPORTS: [&str; 6] = ["spectrum", "influences", "pivotal-law", "disagreement", "marginals", "all"];

fn set_label(mask: usize) -> String {
    (0..usize::BITS as usize).filter(|i| mask >> i & 1 == 1).map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn spectrum_table(t: &TruthTable) -> Table {
    let mut out = Table::new("spectrum", &["mask", "set", "degree", "coefficient"]);
    for (mask, c) in wht(t).nonzero() {
        out.push(row![mask, set_label(mask), mask.count_ones(), c]);
    }
    out
}

pub fn influence_table(t: &TruthTable) -> CliResult<Table> {
    let total = t.len() as u64;
    let mut out = Table::new("influences", &["index", "pivotal_count", "total", "influence"]);
    for (i, c) in influence_counts(t)?.into_iter().enumerate() {
        out.push(row![i, c, total, c as f64 / total as f64]);
    }
    Ok(out)
}

pub fn law_tables(t: &TruthTable) -> CliResult<[Table; 2]> {
    let law = pivotal_law(t)?;
    let mut joint = Table::new("pivotal-law", &["value", "pivotal_count", "count", "total", "probability"]);
    let mut values = Table::new("value-law", &["value", "count", "total", "probability", "mean_pivotal"]);
    for v in Ternary::ALL {
        for m in 0..=law.arity() {
            let c = law.count(v, m);
            if c > 0 {
                joint.push(row![v.to_i8() as i64, m, c, law.total(), law.probability(v, m)]);
            }
        }
        let c = law.value_count(v);
        values.push(row![v.to_i8() as i64, c, law.total(), c as f64 / law.total() as f64, law.conditional_mean(v)]);
    }
    Ok([joint, values])
}

pub fn disagreement_table(t: &TruthTable, eps: &[f64], p: f64) -> CliResult<Table> {
    let mut out = Table::new("disagreement", &["epsilon", "p", "disagreement"]);
    for &e in eps {
        out.push(row![e, p, exact_disagreement(t, e, p)?]);
    }
    Ok(out)
}

pub fn marginal_table(t: &TruthTable) -> CliResult<Table> {
    let mut out = Table::new("marginals", &["order", "i", "j", "spectral", "pivotal", "abs_diff"]);
    for (order, label) in [(MarginalOrder::First, 1u64), (MarginalOrder::Second, 2)] {
        let s = spectral_marginals(t, order)?;
        let p = pivotal_marginals(t, order)?;
        for ((idx, a), (_, b)) in s.entries.iter().zip(&p.entries) {
            out.push(row![label, idx[0], idx.get(1).copied(), *a, *b, (a - b).abs()]);
        }
    }
    Ok(out)
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Vec<Table>> {
    let report = cfg.report.as_deref().unwrap_or("all");
    if !REPORTS.contains(&report) {
        return Err(CliError::Usage(format!("exact report must be one of {}, got {report}", REPORTS.join(", "))));
    }
    let f = cfg.descriptor()?.build()?;
    let t = TruthTable::build(f.as_ref())?;
    let wants = |r: &str| report == r || report == "all";
    let mut tables = Vec::new();
    if wants("spectrum") {
        tables.push(spectrum_table(&t));
    }
    if wants("influences") {
        tables.push(influence_table(&t)?);
    }
    if wants("pivotal-law") {
        tables.extend(law_tables(&t)?);
    }
    if wants("disagreement") {
        tables.push(disagreement_table(&t, &cfg.epsilons(&DEFAULT_EPSILONS), cfg.p)?);
    }
    if wants("marginals") {
        match marginal_table(&t) {
            Ok(m) => tables.push(m),
            // Ternary functions have no spectral sample; `all` leaves them out.
            Err(CliError::Usage(_)) if report == "all" && !t.is_boolean() => {}
            Err(e) => return Err(e),
        }
    }
    Ok(tables)
}
