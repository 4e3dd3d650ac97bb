use proptest::prelude::*;

use pivotal_lab::constructions::{bribed_majority, tribes_generators, Bribable, TribesParams};
use pivotal_lab::exact::{
    direct_disagreement, exact_disagreement, influences, pivotal_marginals, spectral_marginals, wht, MarginalOrder, TruthTable,
};
use pivotal_lab::hypercube::{apply_noise, check_invariance, pivotal_count, Configuration, InvarianceMode};
use pivotal_lab::montecarlo::TribeHistogram;
use pivotal_lab::RandomStream;

fn boolean_table(max_n: usize) -> impl Strategy<Value = TruthTable> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::bool::ANY, 1 << n)
            .prop_map(move |bits| TruthTable::from_values(n, bits.into_iter().map(|b| if b { 1 } else { -1 }).collect()).unwrap())
    })
}

fn ternary_table(max_n: usize) -> impl Strategy<Value = TruthTable> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(-1i8..=1, 1 << n).prop_map(move |v| TruthTable::from_values(n, v).unwrap()))
}

fn layout() -> impl Strategy<Value = TribesParams> {
    (1usize..=5, 1usize..=6).prop_map(|(l, k)| TribesParams::new(l, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_for_boolean_tables(t in boolean_table(8)) {
        let s = wht(&t);
        prop_assert!((s.parseval_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_and_direct_disagreement_agree(t in ternary_table(6), eps in 0.0f64..=1.0) {
        let a = exact_disagreement(&t, eps, 0.5).unwrap();
        let b = direct_disagreement(&t, eps).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn marginals_coincide_for_boolean_tables(t in boolean_table(7)) {
        for order in [MarginalOrder::First, MarginalOrder::Second] {
            let a = spectral_marginals(&t, order).unwrap();
            let b = pivotal_marginals(&t, order).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-10);
        }
    }

    #[test]
    fn first_order_marginals_are_influences(t in boolean_table(7)) {
        let m = pivotal_marginals(&t, MarginalOrder::First).unwrap();
        for (i, inf) in influences(&t).unwrap().into_iter().enumerate() {
            prop_assert!((m.get(&[i]).unwrap() - inf).abs() < 1e-12);
        }
    }

    #[test]
    fn histogram_pivotal_counts_match_flip_all(params in layout(), seed in any::<u64>(), p in 0.1f64..0.9) {
        let f = Bribable::new(params);
        let g = bribed_majority(params).unwrap();
        let mut rng = RandomStream::new(seed, 0).rng();
        let c = Configuration::random(params.n(), p, &mut rng).unwrap();
        let s = TribeHistogram::from_configuration(&c, params).stats();
        prop_assert_eq!(s.pivotal_f, pivotal_count(&f, &c).unwrap() as u64);
        prop_assert_eq!(s.pivotal_g, pivotal_count(&g, &c).unwrap() as u64);
        prop_assert_eq!(s.sign_sum, c.sign_sum());
        if s.neither_full() {
            prop_assert_eq!(s.pivotal_f, s.up + s.down);
        }
    }

    #[test]
    fn bribed_majority_is_invariant_under_the_generators(params in layout(), seed in any::<u64>()) {
        let g = bribed_majority(params).unwrap();
        let mode = InvarianceMode::Sampled { count: 200, base: RandomStream::new(seed, 0) };
        prop_assert!(check_invariance(&g, &tribes_generators(params), mode).unwrap().invariant);
    }

    #[test]
    fn noise_preserves_arity_and_zero_noise_is_identity(n in 1usize..300, seed in any::<u64>(), eps in 0.0f64..=1.0) {
        let mut rng = RandomStream::new(seed, 0).rng();
        let c = Configuration::random(n, 0.5, &mut rng).unwrap();
        prop_assert_eq!(apply_noise(&c, 0.0, 0.5, &mut rng).unwrap(), c.clone());
        prop_assert_eq!(apply_noise(&c, eps, 0.5, &mut rng).unwrap().len(), n);
    }
}
