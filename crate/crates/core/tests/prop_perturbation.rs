use melnikov_lab::closed::{eval_i_kl, eval_m1, eval_n1};
use melnikov_lab::perturbation::{melnikov_params, params_to_perturbation, reflect, PerturbationSpec, Side};
use melnikov_lab::quadrature::{builtin_system, melnikov_quadrature, Model, QuadratureConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(seed: u64, m: usize, holomorphic: bool) -> PerturbationSpec {
    PerturbationSpec::random(m, holomorphic, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn grid() -> impl Iterator<Item = f64> {
    (1..=19).map(|k| k as f64 * 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn params_are_linear(s1 in any::<u64>(), s2 in any::<u64>(), m in 0usize..=3, lambda in -3.0f64..3.0) {
        let (x, y) = (spec(s1, m, false), spec(s2, m, false));
        let combined = melnikov_params(&x.axpy(lambda, &y).unwrap()).unwrap().to_array();
        let (px, py) = (melnikov_params(&x).unwrap().to_array(), melnikov_params(&y).unwrap().to_array());
        for k in 0..9 {
            let want = lambda * px[k] + py[k];
            prop_assert!((combined[k] - want).abs() <= 1e-12 * (1.0 + want.abs()), "component {k}: {} vs {want}", combined[k]);
        }
    }

    #[test]
    fn reflection_swaps_m1_and_n1(seed in any::<u64>(), m in 0usize..=3) {
        let s = spec(seed, m, false);
        let (p, q) = (melnikov_params(&s).unwrap(), melnikov_params(&reflect(&s)).unwrap());
        for r in grid() {
            prop_assert!((eval_n1(&p, r).unwrap() - eval_m1(&q, r).unwrap()).abs() < 1e-10);
            prop_assert!((eval_m1(&p, r).unwrap() - eval_n1(&q, r).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn right_inverse_round_trips(seed in any::<u64>(), m in 0usize..=3, holomorphic in any::<bool>()) {
        let p = melnikov_params(&spec(seed, m, holomorphic)).unwrap();
        let back = melnikov_params(&params_to_perturbation(&p, m, holomorphic).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&p) <= 1e-12 * (1.0 + p.to_array().iter().fold(0.0f64, |a, v| a.max(v.abs()))));
    }

    #[test]
    fn low_degree_restrictions_are_exact(seed in any::<u64>()) {
        let p = melnikov_params(&spec(seed, 1, false)).unwrap();
        prop_assert_eq!((p.beta, p.gamma, p.kappa, p.rho), (0.0, 0.0, 0.0, 0.0));
        let p = melnikov_params(&spec(seed, 0, false)).unwrap();
        prop_assert_eq!((p.d, p.alpha, p.beta, p.gamma, p.kappa, p.rho), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn m1_is_sum_of_blocks(seed in any::<u64>(), m in 0usize..=3) {
        let s = spec(seed, m, false);
        let p = melnikov_params(&s).unwrap();
        for r in grid() {
            let mut sum = 0.0;
            for (k, l, plus, minus) in s.entries() {
                sum += eval_i_kl(plus, k, l, Side::Plus, r).unwrap() - eval_i_kl(minus, k, l, Side::Minus, r).unwrap();
            }
            prop_assert!((eval_m1(&p, r).unwrap() - sum).abs() < 1e-11, "r = {r}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closed_form_matches_quadrature(seed in any::<u64>(), m in 0usize..=3) {
        let s = spec(seed, m, false);
        let p = melnikov_params(&s).unwrap();
        let (left, right) = (builtin_system(Model::HalfIZ2Minus1Left), builtin_system(Model::HalfIZ2Minus1Right));
        let cfg = QuadratureConfig::default();
        for r in grid() {
            let ql = melnikov_quadrature(&left, &s, r, &cfg).unwrap().m1;
            let qr = melnikov_quadrature(&right, &s, r, &cfg).unwrap().m1;
            prop_assert!((ql - eval_m1(&p, r).unwrap()).abs() < 1e-9);
            prop_assert!((qr - eval_n1(&p, r).unwrap()).abs() < 1e-9);
            let reflected = melnikov_quadrature(&left, &reflect(&s), r, &cfg).unwrap().m1;
            prop_assert!((qr - reflected).abs() < 1e-9);
        }
    }
}
