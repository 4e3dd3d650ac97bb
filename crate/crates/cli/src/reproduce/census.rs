use pivotal_lab::constructions::{doubling_k, schedule, Rounding, ThresholdRule, TribesParams};
use pivotal_lab::exact::{tribes_census, TribesCensus};
use pivotal_lab::montecarlo::{mc_tribes_stats, TribeSampler, TribesStatsOptions};
use pivotal_lab::RandomStream;

use super::Runner;
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::Table;
use crate::row;

const ABUNDANCE_SAMPLES: u64 = 100_000;

fn layouts(max_l: usize, max_k: usize, max_n: usize) -> Vec<TribesParams> {
    (1..=max_l)
        .flat_map(|l| (1..=max_k).map(move |k| (l, k)))
        .filter(|&(l, k)| l * k <= max_n)
        .map(|(l, k)| TribesParams::new(l, k).expect("positive sizes"))
        .collect()
}

fn censuses(grid: &[TribesParams]) -> CliResult<Vec<TribesCensus>> {
    Ok(grid.iter().map(|&p| tribes_census(p)).collect::<Result<_, _>>()?)
}

/// Exhaustive tribes law and pivotal-tribe mean, then the pivotal tail of
/// the bribed majority along the schedule (data only).
pub fn abundance(r: &mut Runner, cfg: &ExperimentConfig) -> CliResult<()> {
    let grid = layouts(4, 5, 20);
    let mut rows_ok = Vec::new();
    r.check("tribes-zero-law", 1, |tables| {
        let mut table = Table::new("census", &["l", "k", "total", "zero", "zero_expected", "x_sum", "x_sum_expected"]);
        for c in censuses(&grid)? {
            let (l, k) = (c.l as u32, c.k as u32);
            let zero_expected = ((1u128 << l) - 1).pow(k);
            let x_expected = (c.k * c.l) as u128 * (1u128 << (l * k - l));
            table.push(row![c.l, c.k, c.total, c.zero, zero_expected as u64, c.x_sum, x_expected as u64]);
            rows_ok.push((c.zero as u128 == zero_expected, c.x_sum as u128 == x_expected));
        }
        tables.push(table);
        let bad = rows_ok.iter().filter(|x| !x.0).count();
        Ok((bad == 0, format!("{} layouts, {bad} with count(T=0) != (2^l-1)^k", rows_ok.len())))
    });
    r.check("pivotal-tribe-mean", 2, |_| {
        let bad = rows_ok.iter().filter(|x| !x.1).count();
        Ok((bad == 0 && !rows_ok.is_empty(), format!("{} layouts, {bad} with sum X != k*l*2^(lk-l)", rows_ok.len())))
    });

    let samples = cfg.samples.unwrap_or(ABUNDANCE_SAMPLES);
    r.data("pivotal-tail", 0, |tables| {
        let entries = schedule(&doubling_k(10..=18), Rounding::Ceil)?;
        let mut t = Table::new(
            "pivotal-tail",
            &["j", "k", "l", "mu", "threshold", "p_exceeds", "stderr", "ci_lo", "ci_hi", "mean_pivotal_g", "n_samples"],
        );
        let base = RandomStream::new(cfg.seed, 0);
        for (i, e) in entries.iter().enumerate() {
            let a = e.threshold(ThresholdRule::HalfMean);
            let opts = TribesStatsOptions { thresholds: vec![a], sampler: TribeSampler::Histogram };
            let rep = mc_tribes_stats(e.params()?, cfg.p, samples, base.lane(i as u64), &opts)?;
            let p = rep.p_pivotal_g_exceeds(a)?;
            t.push(row![10 + i, e.k, e.l, e.mu, a, p.point, p.stderr, p.ci_lo, p.ci_hi, rep.mean_pivotal_g().point, samples]);
        }
        tables.push(t);
        Ok(())
    })
}

/// `E[X | T = 1] <= E[X] <= E[X | T = 0]` by cross-multiplied integers.
pub fn sandwich(r: &mut Runner, _cfg: &ExperimentConfig) -> CliResult<()> {
    let grid = layouts(18, 18, 18);
    r.check("conditional-sandwich", 3, |tables| {
        let all = censuses(&grid)?;
        let mut t = Table::new(
            "census",
            &["l", "k", "total", "zero", "one", "x_sum", "x_sum_zero", "x_sum_one", "lower_holds", "upper_holds"],
        );
        let mut bad = 0;
        let mut degenerate = 0;
        for c in &all {
            let (total, zero, one) = (c.total as u128, c.zero as u128, c.one() as u128);
            // x_sum_one/one <= x_sum/total and x_sum/total <= x_sum_zero/zero.
            let lower = c.x_sum_one as u128 * total <= c.x_sum as u128 * one;
            let upper = c.x_sum as u128 * zero <= c.x_sum_zero as u128 * total;
            degenerate += (zero == 0 || one == 0) as usize;
            bad += !(lower && upper) as usize;
            t.push(row![c.l, c.k, c.total, c.zero, c.one(), c.x_sum, c.x_sum_zero, c.x_sum_one, lower, upper]);
        }
        tables.push(t);
        Ok((
            bad == 0 && degenerate == 0,
            format!("{} layouts with lk <= 18, {bad} violations, {degenerate} with an empty event", all.len()),
        ))
    });
    Ok(())
}
