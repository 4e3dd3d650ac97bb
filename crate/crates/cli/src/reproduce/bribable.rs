use pivotal_lab::constructions::{bribed_majority, doubling_k, schedule, tribes_generators, Bribable, Rounding};
use pivotal_lab::hypercube::{check_invariance, check_monotone, orbit, BooleanFunction, InvarianceMode};
use pivotal_lab::montecarlo::{mc_tribes_stats, TribeSampler, TribesStatsOptions};
use pivotal_lab::RandomStream;

use super::{increases, Runner};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::Table;
use crate::row;

const STRUCTURE_MAX_N: usize = 16;
const TREND_SAMPLES: u64 = 100_000;
const TREND_J: [u32; 5] = [10, 12, 14, 16, 18];

pub fn run(r: &mut Runner, cfg: &ExperimentConfig) -> CliResult<()> {
    r.check("structure", 4, |tables| {
        let mut t = Table::new(
            "structure",
            &["l", "k", "f_monotone", "g_monotone", "f_invariant", "g_invariant", "orbit_size", "n"],
        );
        let mut failures = 0;
        let mut layouts = 0;
        for l in 1..=STRUCTURE_MAX_N {
            for k in 1..=STRUCTURE_MAX_N / l {
                let params = pivotal_lab::constructions::TribesParams::new(l, k)?;
                let f = Bribable::new(params);
                let g = bribed_majority(params)?;
                let gens = tribes_generators(params);
                let mode = InvarianceMode::Exhaustive { cap: STRUCTURE_MAX_N };
                let n = params.n();
                let fm = check_monotone(&f)?.monotone;
                let gm = check_monotone(&g)?.monotone;
                let fi = check_invariance(&f, &gens, mode)?.invariant;
                let gi = check_invariance(&g as &dyn BooleanFunction, &gens, mode)?.invariant;
                let orbit_size = orbit(&gens, n, 0)?.len();
                failures += !(fm && gm && fi && gi && orbit_size == n) as usize;
                layouts += 1;
                t.push(row![l, k, fm, gm, fi, gi, orbit_size, n]);
            }
        }
        tables.push(t);
        Ok((failures == 0, format!("{layouts} layouts with lk <= {STRUCTURE_MAX_N}, {failures} failing")))
    });

    let samples = cfg.samples.unwrap_or(TREND_SAMPLES);
    let entries = schedule(&doubling_k(TREND_J[0]..=TREND_J[TREND_J.len() - 1]), Rounding::Ceil)?;
    let mut zero = Vec::new();
    let mut witness = Vec::new();
    let mut up = Vec::new();
    let base = RandomStream::new(cfg.seed, 0);
    r.data("trend-sampling", 7, |tables| {
        let mut t = Table::new(
            "trend",
            &[
                "j",
                "k",
                "l",
                "mu",
                "p_f_zero",
                "p_f_zero_stderr",
                "p_witness",
                "p_witness_stderr",
                "mean_up",
                "mean_up_stderr",
                "expected_up",
                "n_samples",
            ],
        );
        for &j in &TREND_J {
            let e = &entries[(j - TREND_J[0]) as usize];
            let opts = TribesStatsOptions { thresholds: vec![], sampler: TribeSampler::Histogram };
            let rep = mc_tribes_stats(e.params()?, 0.5, samples, base.lane(j as u64), &opts)?;
            let (z, w, u) = (rep.p_f_zero(), rep.p_witness(), rep.mean_up());
            t.push(row![j, e.k, e.l, e.mu, z.point, z.stderr, w.point, w.stderr, u.point, u.stderr, rep.expected_up(), samples]);
            zero.push((z.point, z.stderr));
            witness.push((w.point, w.stderr));
            up.push((u.point, u.stderr, rep.expected_up()));
        }
        tables.push(t);
        Ok(())
    })?;
    r.check("f-zero-increases", 7, |_| Ok(increases(&zero)));
    r.check("witness-increases", 7, |_| Ok(increases(&witness)));
    r.check("mean-up-matches-mu", 7, |_| {
        let worst = up.iter().map(|(m, se, mu)| (m - mu).abs() / se).fold(0.0, f64::max);
        Ok((worst <= 4.0, format!("worst |mean(U) - mu| = {worst:.2} stderr")))
    });
    Ok(())
}
