use pivotal_lab::constructions::{bribed_majority, Dictator, Majority, Parity, TieRule, Tribes, TribesParams};
use pivotal_lab::exact::TruthTable;
use pivotal_lab::BooleanFunction;

use super::Runner;
use crate::commands::exact::marginal_table;
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{Cell, Table};

const TOLERANCE: f64 = 1e-10;

fn battery() -> CliResult<Vec<(&'static str, Box<dyn BooleanFunction>)>> {
    let t22 = TribesParams::new(2, 2)?;
    Ok(vec![
        ("dictator-3", Box::new(Dictator::new(3, 0)?)),
        ("parity-4", Box::new(Parity::new(4))),
        ("majority-3", Box::new(Majority::new(3, TieRule::Error)?)),
        ("majority-5", Box::new(Majority::new(5, TieRule::Error)?)),
        ("tribes-2-2", Box::new(Tribes::new(t22))),
        ("tribes-2-3", Box::new(Tribes::new(TribesParams::new(2, 3)?))),
        ("bribed-2-2", Box::new(bribed_majority(t22)?)),
    ])
}

pub fn run(r: &mut Runner, _cfg: &ExperimentConfig) -> CliResult<()> {
    let mut all = Table::new("marginals", &["function", "order", "i", "j", "spectral", "pivotal", "abs_diff"]);
    for (name, f) in battery()? {
        r.check(&format!("marginals-{name}"), 5, |_| {
            let t = TruthTable::build(f.as_ref())?;
            let m = marginal_table(&t)?;
            let diff = m.column("abs_diff").expect("column exists");
            let worst = m.rows.iter().map(|row| if let Cell::Float(d) = row[diff] { d } else { f64::NAN }).fold(0.0, f64::max);
            for row in m.rows {
                let mut out = vec![Cell::from(name)];
                out.extend(row);
                all.push(out);
            }
            Ok((worst <= TOLERANCE, format!("n = {}, max |spectral - pivotal| = {worst:.3e}", t.arity())))
        });
    }
    r.tables.push(all);
    Ok(())
}
