use pivotal_lab::constructions::{pivotal_threshold, FunctionDescriptor, TribesParams};
use pivotal_lab::montecarlo::{
    mc_disagreement, mc_pivotal_count, mc_stability_sandwich, mc_tribes_stats, Estimate, Provenance, TribesStatsOptions,
    TribesStatsReport,
};
use pivotal_lab::hypercube::Ternary;
use pivotal_lab::RandomStream;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};
use crate::row;

pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_EPSILONS: [f64; 3] = [0.05, 0.2, 0.5];

pub const COLUMNS: [&str; 12] =
    ["family", "k", "l", "p", "epsilon", "quantity", "estimate", "stderr", "ci_lo", "ci_hi", "n_samples", "seed"];

const STATS_ROWS: [&str; 8] =
    ["p-f-minus", "p-f-zero", "p-f-plus", "p-witness", "p-neither-full", "mean-up", "mean-down", "mean-pivotal-g"];

/// One function instance to estimate on.
struct Unit {
    descriptor: FunctionDescriptor,
    layout: Option<TribesParams>,
}

fn units(cfg: &ExperimentConfig) -> CliResult<Vec<Unit>> {
    let family = cfg.family.ok_or_else(|| CliError::Usage("--family is required".into()))?;
    if family.uses_layout() {
        Ok(cfg
            .layouts()?
            .into_iter()
            .map(|p| Unit { descriptor: cfg.descriptor_on(family, p.l(), p.k()), layout: Some(p) })
            .collect())
    } else {
        Ok(vec![Unit { descriptor: cfg.descriptor()?, layout: None }])
    }
}

fn layout_of(u: &Unit, quantity: &str) -> CliResult<TribesParams> {
    u.layout.ok_or_else(|| CliError::Usage(format!("quantity {quantity} needs a tribes family (tribes, bribable or bribed)")))
}

pub struct Rows<'a> {
    pub table: Table,
    cfg: &'a ExperimentConfig,
}

impl<'a> Rows<'a> {
    pub fn new(name: &str, cfg: &'a ExperimentConfig) -> Self {
        Rows { table: Table::new(name, &COLUMNS), cfg }
    }

    pub fn push(&mut self, family: &str, layout: Option<TribesParams>, eps: Option<f64>, quantity: &str, e: &Estimate) {
        let (k, l) = match layout {
            Some(p) => (Cell::from(p.k()), Cell::from(p.l())),
            None => (Cell::Empty, Cell::Empty),
        };
        let mut r = vec![Cell::from(family), k, l];
        r.extend(row![self.cfg.p, eps, quantity, e.point, e.stderr, e.ci_lo, e.ci_hi, e.n_samples, self.cfg.seed]);
        self.table.push(r);
    }
}

/// Thresholds requested explicitly, else the rule applied to the layout's mean.
pub fn thresholds_for(cfg: &ExperimentConfig, p: TribesParams) -> Vec<u64> {
    cfg.thresholds.clone().unwrap_or_else(|| {
        let mu = p.k() as f64 * p.l() as f64 * (-(p.l() as f64)).exp2();
        vec![pivotal_threshold(mu, cfg.threshold_rule())]
    })
}

pub fn stats_estimates(r: &TribesStatsReport) -> CliResult<Vec<(String, Estimate)>> {
    let mut out = vec![
        ("p-f-minus".to_string(), r.p_f(Ternary::Minus)),
        ("p-f-zero".to_string(), r.p_f_zero()),
        ("p-f-plus".to_string(), r.p_f(Ternary::Plus)),
        ("p-witness".to_string(), r.p_witness()),
        ("p-neither-full".to_string(), r.p_neither_full()),
        ("mean-up".to_string(), r.mean_up()),
        ("mean-down".to_string(), r.mean_down()),
        ("mean-pivotal-g".to_string(), r.mean_pivotal_g()),
    ];
    for &a in &r.thresholds {
        out.push((format!("p-pivotal-g-exceeds-{a}"), r.p_pivotal_g_exceeds(a)?));
    }
    Ok(out)
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Vec<Table>> {
    let quantity = cfg.quantity.as_deref().unwrap_or("disagreement");
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let base = RandomStream::new(cfg.seed, 0);
    let mut rows = Rows::new("mc", cfg);
    let mut lane = 0u64;
    let mut next = || {
        lane += 1;
        base.lane(lane - 1)
    };
    for u in units(cfg)? {
        let family = u.descriptor.family_name();
        match quantity {
            "disagreement" => {
                let f = u.descriptor.build()?;
                for e in cfg.epsilons(&DEFAULT_EPSILONS) {
                    let est = mc_disagreement(f.as_ref(), e, cfg.p, samples, next())?;
                    rows.push(family, u.layout, Some(e), quantity, &est);
                }
            }
            "sandwich" => {
                let params = layout_of(&u, quantity)?;
                for e in cfg.epsilons(&DEFAULT_EPSILONS) {
                    let r = mc_stability_sandwich(params, e, cfg.p, samples, next())?;
                    rows.push(family, u.layout, Some(e), "g-disagreement", &r.g);
                    rows.push(family, u.layout, Some(e), "maj-disagreement", &r.maj);
                    rows.push(family, u.layout, Some(e), "f-active", &r.f_active);
                }
            }
            "pivotal-count" => {
                let f = u.descriptor.build()?;
                let stream = next();
                let law = mc_pivotal_count(f.as_ref(), cfg.p, samples, stream)?;
                let prov = Provenance::new(stream, samples);
                let (mut sum, mut sq) = (0u128, 0u128);
                for (m, &c) in law.histogram().iter().enumerate() {
                    sum += m as u128 * c as u128;
                    sq += (m * m) as u128 * c as u128;
                }
                rows.push(family, u.layout, None, "mean-pivotal", &Estimate::mean(sum, sq, samples, prov));
                let thresholds = match u.layout {
                    Some(p) => thresholds_for(cfg, p),
                    None => cfg.thresholds.clone().unwrap_or_default(),
                };
                for a in thresholds {
                    let hits: u64 = law.histogram().iter().skip(a as usize + 1).sum();
                    rows.push(family, u.layout, None, &format!("p-pivotal-exceeds-{a}"), &Estimate::proportion(hits, samples, prov));
                }
            }
            q if q == "tribes-stats" || STATS_ROWS.contains(&q) || q.starts_with("p-pivotal-g-exceeds-") => {
                let params = layout_of(&u, quantity)?;
                let opts = TribesStatsOptions { thresholds: thresholds_for(cfg, params), sampler: cfg.sampler.unwrap_or_default() };
                let r = mc_tribes_stats(params, cfg.p, samples, next(), &opts)?;
                let all = stats_estimates(&r)?;
                let picked: Vec<_> = all.iter().filter(|(name, _)| q == "tribes-stats" || name == q).collect();
                if picked.is_empty() {
                    return Err(CliError::Usage(format!("quantity {q} was not computed; pass its threshold with --thresholds")));
                }
                for (name, e) in picked {
                    rows.push(family, u.layout, None, name, e);
                }
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown quantity {other}; expected disagreement, sandwich, pivotal-count, tribes-stats or one of {}",
                    STATS_ROWS.join(", ")
                )))
            }
        }
    }
    Ok(vec![rows.table])
}
