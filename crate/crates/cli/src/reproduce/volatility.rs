use pivotal_lab::constructions::{doubling_k, schedule, Dictator, FunctionDescriptor, Parity, Rounding, ThresholdRule};
use pivotal_lab::dynamics::{bound_verdict, pivotal_at_most, volatility_curve, volatility_of, DynamicsConfig};
use pivotal_lab::RandomStream;

use super::Runner;
use crate::commands::dynamics::{bound_row, volatility_row, BOUND_COLUMNS, COLUMNS};
use crate::config::{ExperimentConfig, Family};
use crate::error::CliResult;
use crate::output::Table;

const DICTATOR_TRIALS: u64 = 100_000;
const PARITY_N: usize = 10;
const PARITY_TRIALS: u64 = 20_000;
const SWEEP_TRIALS: u64 = 10_000;
const SWEEP_J: std::ops::RangeInclusive<u32> = 10..=14;
const BOUND_SAMPLES: u64 = 100_000;

pub fn run(r: &mut Runner, cfg: &ExperimentConfig) -> CliResult<()> {
    let base = RandomStream::new(cfg.seed, 0);
    let mut dcfg: DynamicsConfig = cfg.dynamics(SWEEP_TRIALS);
    dcfg.validate()?;
    let mut vol = Table::new("volatility", &COLUMNS);

    let single = DynamicsConfig { trials: DICTATOR_TRIALS, ..dcfg };
    r.check("dictator-p-c0", 9, |_| {
        let e = volatility_of(&Dictator::new(1, 0)?, "dictator", &single, base.lane(0))?;
        volatility_row(&mut vol, &e, None, &single, cfg.seed);
        let oracle = (-dcfg.duration).exp();
        let z = (e.p_c0.point - oracle) / e.p_c0.stderr;
        Ok((z.abs() <= 4.0, format!("P[C=0] = {:.5} vs exp(-t) = {oracle:.5}, z = {z:.2}", e.p_c0.point)))
    });

    let parity_cfg = DynamicsConfig { trials: PARITY_TRIALS, ..dcfg };
    r.check("parity-mean-changes", 9, |_| {
        let e = volatility_of(&Parity::new(PARITY_N), "parity", &parity_cfg, base.lane(1))?;
        volatility_row(&mut vol, &e, None, &parity_cfg, cfg.seed);
        // Each flip toggles parity; a resample changes the bit half the time.
        let rate = match parity_cfg.semantics {
            pivotal_lab::dynamics::Semantics::Flip => 1.0,
            pivotal_lab::dynamics::Semantics::Resample => 2.0 * parity_cfg.p * (1.0 - parity_cfg.p),
        };
        let oracle = PARITY_N as f64 * parity_cfg.duration * rate;
        let z = (e.mean_c.point - oracle) / e.mean_c.stderr;
        Ok((z.abs() <= 4.0, format!("mean C = {:.4} vs {oracle}, z = {z:.2}", e.mean_c.point)))
    });

    // A family in the config replaces the bribed majority; used as a negative control.
    let family = cfg.family.unwrap_or(Family::Bribed);
    let descriptor = cfg.descriptor_on(family, 1, 1);
    dcfg.trials = cfg.trials.unwrap_or(SWEEP_TRIALS);
    let entries = schedule(&doubling_k(SWEEP_J), Rounding::Ceil)?;
    let mut report = None;
    r.data("sweep-trajectories", 9, |_| {
        report = Some(volatility_curve(&descriptor, &entries, &dcfg, base.lane(2))?);
        Ok(())
    })?;
    let report = report.expect("sweep ran");
    for (e, s) in report.entries.iter().zip(&entries) {
        volatility_row(&mut vol, e, Some(s.params()?), &dcfg, cfg.seed);
    }
    let points: Vec<String> = report.entries.iter().map(|e| format!("{:.4}", e.p_c0.point)).collect();
    r.check("sweep-strictly-decreasing", 9, |_| Ok((report.strictly_decreasing(), format!("P[C=0] = {}", points.join(", ")))));
    r.check("sweep-endpoint-separation", 9, |_| {
        let sep = report.endpoint_separation().unwrap_or(0.0);
        Ok((sep > 4.0, format!("first - last = {sep:.2} combined stderr")))
    });

    let mut bound = Table::new("bound", &BOUND_COLUMNS);
    let samples = cfg.samples.unwrap_or(BOUND_SAMPLES);
    r.check("pivotal-bound", 9, |_| {
        let (last, e) = (entries.last().expect("non-empty sweep"), report.entries.last().expect("non-empty sweep"));
        let a = last.threshold(ThresholdRule::HalfMean);
        let d: FunctionDescriptor = descriptor.with_layout(last.params()?);
        let few = pivotal_at_most(&d, a, dcfg.p, samples, base.lane(3))?;
        let v = bound_verdict(e.p_c0, few, a);
        bound_row(&mut bound, d.family_name(), Some(last.params()?), e.n, &v);
        Ok((v.holds(), format!("a = {a}, P[C=0] = {:.4}, bound = {:.4}, margin = {:.4}", v.p_c0.point, v.bound, v.margin)))
    });
    r.tables.push(vol);
    r.tables.push(bound);
    Ok(())
}
