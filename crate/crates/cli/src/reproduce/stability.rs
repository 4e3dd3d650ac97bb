use pivotal_lab::constructions::{bribed_majority, schedule_l, Bribable, Majority, TieRule, TribesParams};
use pivotal_lab::exact::{exact_count, exact_disagreement, TruthTable};
use pivotal_lab::hypercube::{Configuration, Ternary};
use pivotal_lab::montecarlo::{
    mc_disagreement, mc_stability_sandwich, mc_tribes_stats, Estimate, TribeHistogram, TribeSampler, TribesStatsOptions,
};
use pivotal_lab::{BooleanFunction, RandomStream};

use super::Runner;
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::Table;
use crate::row;

const SAMPLES: u64 = 100_000;
const EPSILONS: [f64; 3] = [0.05, 0.2, 0.5];
const RUNS: u64 = 100;
const SANDWICH_J: u32 = 14;
const SANDWICH_SAMPLES: u64 = 20_000;
const SANDWICH_EPSILONS: [f64; 3] = [0.01, 0.05, 0.1];

/// Exact `P[U > 0 ∧ D > 0 ∧ f = 0]`, `E[U]` and `P[f = v]` by enumeration.
struct ExactTribes {
    witness: f64,
    mean_up: f64,
    values: [f64; 3],
}

fn exact_tribes(params: TribesParams) -> CliResult<ExactTribes> {
    let t = TruthTable::build(&Bribable::new(params))?;
    let total = t.len() as f64;
    let (mut witness, mut up) = (0u64, 0u64);
    for code in 0..t.len() as u64 {
        let s = TribeHistogram::from_configuration(&Configuration::from_code(params.n(), code), params).stats();
        witness += s.witness() as u64;
        up += s.up;
    }
    let values = Ternary::ALL.map(|v| t.count(v) as f64 / total);
    Ok(ExactTribes { witness: witness as f64 / total, mean_up: up as f64 / total, values })
}

pub fn run(r: &mut Runner, cfg: &ExperimentConfig) -> CliResult<()> {
    let samples = cfg.samples.unwrap_or(SAMPLES);
    let base = RandomStream::new(cfg.seed, 0);

    r.check("mc-vs-exact", 6, |tables| {
        let mut t = Table::new("mc-vs-exact", &["function", "quantity", "epsilon", "exact", "estimate", "stderr", "z", "within"]);
        let mut lane = 0u64;
        let mut misses = 0;
        let mut record = |t: &mut Table, name: &str, q: &str, eps: Option<f64>, exact: f64, e: &Estimate| {
            let z = if e.stderr > 0.0 { (e.point - exact) / e.stderr } else { 0.0 };
            let ok = e.within_sigmas(exact, 4.0);
            misses += !ok as usize;
            t.push(row![name, q, eps, exact, e.point, e.stderr, z, ok]);
        };
        let g44 = TribesParams::new(4, 4)?;
        let fs: Vec<(&str, Box<dyn BooleanFunction>)> = vec![
            ("majority-5", Box::new(Majority::new(5, TieRule::Error)?)),
            ("bribable-2-3", Box::new(Bribable::new(TribesParams::new(2, 3)?))),
            ("bribed-4-4", Box::new(bribed_majority(g44)?)),
        ];
        for (name, f) in &fs {
            for eps in EPSILONS {
                let exact = exact_disagreement(f.as_ref(), eps, 0.5)?;
                let est = mc_disagreement(f.as_ref(), eps, 0.5, samples, base.lane(lane))?;
                lane += 1;
                record(&mut t, name, "disagreement", Some(eps), exact, &est);
            }
        }
        let ex = exact_tribes(g44)?;
        let opts = TribesStatsOptions { thresholds: vec![], sampler: TribeSampler::Scan };
        let rep = mc_tribes_stats(g44, 0.5, samples, base.lane(lane), &opts)?;
        for v in Ternary::ALL {
            record(&mut t, "bribable-4-4", &format!("p-f-{}", v.to_i8()), None, ex.values[v.index()], &rep.p_f(v));
        }
        record(&mut t, "bribable-4-4", "p-witness", None, ex.witness, &rep.p_witness());
        record(&mut t, "bribable-4-4", "mean-up", None, ex.mean_up, &rep.mean_up());
        let rows = t.rows.len();
        tables.push(t);
        Ok((misses == 0, format!("{rows} estimates at {samples} samples, {misses} outside 4 stderr")))
    });

    r.check("wilson-coverage", 6, |tables| {
        let mut t = Table::new("coverage", &["quantity", "exact", "runs", "samples_per_run", "covered"]);
        let maj = Majority::new(5, TieRule::Error)?;
        let d_exact = exact_disagreement(&maj, 0.2, 0.5)?;
        let cal = base.lane(1 << 20);
        let d_cov = (0..RUNS)
            .map(|i| mc_disagreement(&maj, 0.2, 0.5, 2000, cal.lane(i)).map(|e| e.covers(d_exact) as u64))
            .sum::<Result<u64, _>>()?;
        let p23 = TribesParams::new(2, 3)?;
        let z_exact = exact_count(&Bribable::new(p23), Ternary::Zero)? as f64 / 64.0;
        let opts = TribesStatsOptions { thresholds: vec![], sampler: TribeSampler::Scan };
        let cal = base.lane(1 << 21);
        let z_cov = (0..RUNS)
            .map(|i| mc_tribes_stats(p23, 0.5, 1000, cal.lane(i), &opts).map(|r| r.p_f_zero().covers(z_exact) as u64))
            .sum::<Result<u64, _>>()?;
        t.push(row!["majority-5-disagreement-0.2", d_exact, RUNS, 2000u64, d_cov]);
        t.push(row!["bribable-2-3-p-f-zero", z_exact, RUNS, 1000u64, z_cov]);
        tables.push(t);
        let need = RUNS * 9 / 10;
        Ok((d_cov >= need && z_cov >= need, format!("covered {d_cov}/{RUNS} and {z_cov}/{RUNS}, need {need}")))
    });

    let sandwich_samples = cfg.samples.unwrap_or(SANDWICH_SAMPLES);
    r.check("stability-sandwich", 8, |tables| {
        let k = 1usize << SANDWICH_J;
        let params = TribesParams::new(schedule_l(k as u64, Default::default())? as usize, k)?;
        let mut t = Table::new(
            "sandwich",
            &[
                "j",
                "l",
                "k",
                "epsilon",
                "g",
                "g_stderr",
                "maj",
                "maj_stderr",
                "f_active",
                "f_active_stderr",
                "rhs",
                "slack",
                "pathwise_violations",
                "holds",
                "n_samples",
            ],
        );
        let mut bad = 0;
        for (i, eps) in SANDWICH_EPSILONS.into_iter().enumerate() {
            let s = mc_stability_sandwich(params, eps, 0.5, sandwich_samples, base.lane((1 << 22) + i as u64))?;
            bad += !s.bound_holds() as usize;
            t.push(row![
                SANDWICH_J,
                params.l(),
                params.k(),
                eps,
                s.g.point,
                s.g.stderr,
                s.maj.point,
                s.maj.stderr,
                s.f_active.point,
                s.f_active.stderr,
                s.rhs(),
                s.slack,
                s.pathwise_violations,
                s.bound_holds(),
                sandwich_samples
            ]);
        }
        tables.push(t);
        Ok((bad == 0, format!("{} noise levels at j = {SANDWICH_J}, {bad} violations", SANDWICH_EPSILONS.len())))
    });
    Ok(())
}
