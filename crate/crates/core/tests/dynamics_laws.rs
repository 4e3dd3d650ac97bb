use pivotal_lab::constructions::{bribed_majority, Dictator, FunctionDescriptor, Majority, Parity, TieRule, TribesParams};
use pivotal_lab::dynamics::{
    run_trials, simulate_trajectory, value_frequencies, volatility_curve, volatility_of, DynamicsConfig, Semantics,
};
use pivotal_lab::hypercube::Ternary;
use pivotal_lab::montecarlo::{chi_square, chi_square_critical, Estimate, Provenance};
use pivotal_lab::RandomStream;

#[test]
fn single_dictator_never_changes_with_probability_one_over_e() {
    let f = Dictator::new(1, 0).unwrap();
    let e = volatility_of(&f, "dictator", &DynamicsConfig::new(100_000), RandomStream::new(31, 0)).unwrap();
    let oracle = (-1.0f64).exp();
    assert!((oracle - 0.367_88).abs() < 1e-5);
    assert!(e.p_c0.within_sigmas(oracle, 4.0), "{:?}", e.p_c0);
}

#[test]
fn dictator_change_count_is_poisson_one() {
    let f = Dictator::new(1, 0).unwrap();
    let e = volatility_of(&f, "dictator", &DynamicsConfig::new(50_000), RandomStream::new(32, 0)).unwrap();
    let hist: Vec<u64> = (0..8).map(|c| e.tally.histogram.get(&c).copied().unwrap_or(0)).collect();
    let tail = e.tally.trials - hist.iter().sum::<u64>();
    let mut observed = hist.clone();
    observed.push(tail);
    let mut fact = 1.0;
    let mut expected: Vec<f64> = (0..8)
        .map(|c| {
            if c > 0 {
                fact *= c as f64;
            }
            (-1.0f64).exp() / fact
        })
        .collect();
    expected.push(1.0 - expected.iter().sum::<f64>());
    let (stat, dof) = chi_square(&observed, &expected).unwrap();
    assert!(stat < chi_square_critical(dof, 0.001), "chi2 {stat} on {dof}");
}

#[test]
fn parity_changes_on_every_flip() {
    let n = 10;
    let f = Parity::new(n);
    let e = volatility_of(&f, "parity", &DynamicsConfig::new(20_000), RandomStream::new(33, 0)).unwrap();
    assert!(e.mean_c.within_sigmas(n as f64, 4.0), "{:?}", e.mean_c);
    assert_eq!(e.tally.change_sum, e.tally.event_sum);
}

#[test]
fn resampling_halves_the_parity_rate() {
    let n = 10;
    let f = Parity::new(n);
    let mut cfg = DynamicsConfig::new(20_000);
    cfg.semantics = Semantics::Resample;
    let e = volatility_of(&f, "parity", &cfg, RandomStream::new(34, 0)).unwrap();
    assert!(e.mean_c.within_sigmas(n as f64 / 2.0, 4.0), "{:?}", e.mean_c);
}

#[test]
fn event_count_has_poisson_mean_and_variance() {
    let f = Parity::new(25);
    let mut cfg = DynamicsConfig::new(40_000);
    cfg.duration = 0.8;
    let t = run_trials(&f, &cfg, RandomStream::new(35, 0)).unwrap();
    let lambda = 25.0 * 0.8;
    let n = t.trials as f64;
    let mean = t.event_sum as f64 / n;
    let var = (t.event_sq_sum as f64 - n * mean * mean) / (n - 1.0);
    assert!((mean - lambda).abs() <= 4.0 * (lambda / n).sqrt(), "mean {mean}");
    // Var of the sample variance of a Poisson law: (λ + 2λ²(n/(n−1)))/n.
    let se_var = ((lambda + 2.0 * lambda * lambda) / n).sqrt();
    assert!((var - lambda).abs() <= 4.0 * se_var, "var {var}");
}

#[test]
fn biased_resample_dynamics_is_stationary() {
    let f = Majority::new(9, TieRule::Error).unwrap();
    let mut cfg = DynamicsConfig::new(40_000);
    cfg.semantics = Semantics::Resample;
    cfg.p = 0.35;
    cfg.duration = 2.0;
    let t = run_trials(&f, &cfg, RandomStream::new(36, 0)).unwrap();
    let (start, end) = value_frequencies(&t, Ternary::Plus);
    let observed = [t.final_values[Ternary::Minus.index()], t.final_values[Ternary::Plus.index()]];
    let (stat, dof) = chi_square(&observed, &[1.0 - start, start]).unwrap();
    assert!(stat < chi_square_critical(dof, 0.001), "start {start} end {end}");
}

#[test]
fn flip_semantics_rejects_bias() {
    let f = Parity::new(3);
    let mut cfg = DynamicsConfig::new(10);
    cfg.p = 0.4;
    assert!(simulate_trajectory(&f, &cfg, RandomStream::new(0, 0)).is_err());
}

#[test]
fn bribed_majority_session_stays_consistent() {
    let g = bribed_majority(TribesParams::new(3, 20).unwrap()).unwrap();
    for s in 0..200 {
        // The consistency assertion inside the simulator is the check.
        simulate_trajectory(&g, &DynamicsConfig::new(1), RandomStream::new(37, s)).unwrap();
    }
}

#[test]
fn majority_stays_away_from_zero_and_one() {
    let s = pivotal_lab::constructions::schedule(&[64, 256, 1024], Default::default()).unwrap();
    let fam = FunctionDescriptor::Majority { n: 1, tie_rule: TieRule::Plus };
    let r = volatility_curve(&fam, &s, &DynamicsConfig::new(4000), RandomStream::new(38, 0)).unwrap();
    for e in &r.entries {
        assert!(e.p_c0.ci_lo > 0.05 && e.p_c0.ci_hi < 0.95, "{:?}", e.p_c0);
    }
}

#[test]
fn curve_reports_endpoint_separation() {
    let s = pivotal_lab::constructions::schedule(&[16, 32], Default::default()).unwrap();
    let fam = FunctionDescriptor::Constant { n: 1, value: 1 };
    let r = volatility_curve(&fam, &s, &DynamicsConfig::new(10), RandomStream::new(0, 0)).unwrap();
    assert_eq!(r.endpoint_separation(), Some(0.0));
    assert!(!r.decreasing());
    let prov = Provenance::new(RandomStream::new(0, 0), 1);
    assert!(Estimate::proportion(1, 1, prov).covers(1.0));
}
