use melnikov_lab::closed::Which;
use melnikov_lab::perturbation::{melnikov_params, PerturbationSpec};
use melnikov_lab::rootkit::isolate::zeros_of;
use melnikov_lab::rootkit::poly::{rational, RationalPolynomial};
use melnikov_lab::rootkit::wronskian::{f_closed_forms, f_w4_derivative_scaled};
use melnikov_lab::rootkit::{discriminant, sturm_count};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Roots as multiples of 1/64 in (-1, 2), never 0 or 1.
fn root() -> impl Strategy<Value = i64> {
    (-63i64..128).prop_filter("endpoint", |k| *k != 0 && *k != 64)
}

fn poly_from(roots: &[i64], pair: Option<i64>, lead: i64) -> RationalPolynomial {
    let rs: Vec<BigRational> = roots.iter().map(|&k| rational(k, 64)).collect();
    let mut p = RationalPolynomial::from_roots(&rs).scale(&rational(lead, 1));
    if let Some(c) = pair {
        p = &p * &RationalPolynomial::from_i64(&[c, 0, 1]);
    }
    p
}

fn sampled_count(p: &RationalPolynomial) -> usize {
    let n = 20_000;
    let vals: Vec<f64> = (1..n).map(|k| p.eval_f64(k as f64 / n as f64)).collect();
    vals.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sturm_matches_sampling(roots in prop::collection::vec(root(), 3..=4), lead in prop_oneof![-5i64..=-1, 1i64..=5]) {
        let mut distinct = roots.clone();
        distinct.sort();
        distinct.dedup();
        prop_assume!(distinct.len() == roots.len());
        let p = poly_from(&roots, None, lead);
        let exact = sturm_count(&p, &rational(0, 1), &rational(1, 1)).unwrap();
        prop_assert_eq!(exact, roots.iter().filter(|&&k| k > 0 && k < 64).count());
        prop_assert_eq!(exact, sampled_count(&p));
    }

    #[test]
    fn complex_pairs_are_not_counted(roots in prop::collection::vec(root(), 1..=2), c in 1i64..10) {
        let mut distinct = roots.clone();
        distinct.dedup();
        prop_assume!(distinct.len() == roots.len());
        let p = poly_from(&roots, Some(c), 1);
        let exact = sturm_count(&p, &rational(0, 1), &rational(1, 1)).unwrap();
        prop_assert_eq!(exact, roots.iter().filter(|&&k| k > 0 && k < 64).count());
    }

    #[test]
    fn discriminant_detects_repeated_roots(roots in prop::collection::vec(root(), 2..=4)) {
        let p = poly_from(&roots, None, 3);
        let repeated = p.gcd(&p.derivative()).degree().unwrap_or(0) > 0;
        let mut distinct = roots.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(repeated, distinct.len() < roots.len());
        prop_assert_eq!(discriminant(&p).unwrap() == rational(0, 1), repeated);
    }

    #[test]
    fn w4_identity(r in 0.001f64..0.999) {
        let lhs = f_w4_derivative_scaled(r);
        let rhs = 768.0 * r.powi(4);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs, "r = {r}: {lhs} vs {rhs}");
    }

    #[test]
    fn wronskians_positive(r in 0.001f64..0.999) {
        prop_assert!(f_closed_forms(r).iter().all(|&w| w > 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn ect_ceilings(seed in any::<u64>(), m in 0usize..=3) {
        let p = melnikov_params(&PerturbationSpec::random(m, false, &mut ChaCha8Rng::seed_from_u64(seed))).unwrap();
        let cap = if m == 0 { 1 } else { m + 3 };
        for which in [Which::M1, Which::N1] {
            let rep = zeros_of(&p, which).unwrap();
            prop_assert!(rep.count() <= cap, "{} zeros for m = {m}", rep.count());
            prop_assert!(rep.count() <= rep.ceiling);
        }
    }
}
