use melnikov_lab::closed::{eval_m1, eval_n1};
use melnikov_lab::designer::{
    case_iv_params, design, per_function_cap, polynomial_case_analysis, polynomial_pair, q_kappa_family, realizable_table, realize_seeded,
    target_count, third_root_formula, verify_reports, verify_spec, Target, ZeroTarget, POLYNOMIAL_BOUNDS,
};
use melnikov_lab::perturbation::{melnikov_params, MelnikovParams, PerturbationSpec};
use melnikov_lab::rootkit::parametric_root_regions;
use melnikov_lab::rootkit::poly::{isolate_real_roots, rational, rational_from_f64, Bound, RationalPolynomial, SturmSequence};
use melnikov_lab::Error;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Distinct target locations on a 1/40 grid of (0.05, 0.95), split between `f` and `g`
/// within the per-function cap.
fn targets(seed: u64, m: usize) -> Vec<ZeroTarget> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = target_count(m, false).unwrap();
    let cap = per_function_cap(m, false);
    let mut grid: Vec<usize> = (2..=38).collect();
    grid.shuffle(&mut rng);
    let n_f = rng.gen_range(n.saturating_sub(cap)..=cap.min(n));
    grid[..n]
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            let r = g as f64 / 40.0;
            if k < n_f { ZeroTarget::f(r) } else { ZeroTarget::g(r) }
        })
        .collect()
}

fn value(p: &MelnikovParams, t: &ZeroTarget, r: f64) -> f64 {
    match t.which {
        Target::F => eval_m1(p, r).unwrap(),
        Target::G => eval_n1(p, r).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn designed_zeros_are_exact_and_simple(seed in any::<u64>(), m in 1usize..=3) {
        let ts = targets(seed, m);
        let p = match design(&ts, m, false) {
            Err(Error::IllConditioned { .. }) => return Err(TestCaseError::reject("ill-conditioned layout")),
            other => other.unwrap(),
        };
        for t in &ts {
            let r = t.location;
            prop_assert!(value(&p, t, r).abs() < 1e-9, "residual {} at {r}", value(&p, t, r));
            let h = 1e-6;
            let slope = (value(&p, t, r + h) - value(&p, t, r - h)) / (2.0 * h);
            prop_assert!(slope.abs() > 1e-8, "flat zero at {r}");
        }
    }

    #[test]
    fn holomorphic_low_degree_pairing(seed in any::<u64>(), m in 1usize..=2) {
        let spec = PerturbationSpec::random(m, true, &mut ChaCha8Rng::seed_from_u64(seed));
        let p = melnikov_params(&spec).unwrap();
        let (rm, rn) = verify_reports(&p, m, true).unwrap();
        let quad = RationalPolynomial::new(vec![rational_from_f64(p.a).unwrap(), rational_from_f64(p.b).unwrap(), rational_from_f64(p.c).unwrap()]);
        let sturm = SturmSequence::new(&quad.square_free());
        let one = Bound::At(rational(1, 1));
        prop_assert_eq!(rm.count(), sturm.count(&Bound::At(rational(0, 1)), &one).unwrap());
        prop_assert_eq!(rn.count(), sturm.count(&one, &Bound::PosInfinity).unwrap());
    }

    #[test]
    fn polynomial_case_bounds(seed in any::<u64>(), m in 0usize..=3) {
        let spec = PerturbationSpec::random(m, false, &mut ChaCha8Rng::seed_from_u64(seed));
        let p = MelnikovParams { alpha: 0.0, beta: 0.0, gamma: 0.0, ..melnikov_params(&spec).unwrap() };
        let pc = polynomial_case_analysis(&p, m).unwrap();
        prop_assert!(pc.configuration.m1 + pc.configuration.n1 <= POLYNOMIAL_BOUNDS[m]);
        prop_assert!(pc.bound_check);
    }

    #[test]
    fn third_root_formula_matches_roots(r in prop::array::uniform3(0.01f64..0.99), s in prop::array::uniform2(0.01f64..0.99)) {
        let v = third_root_formula(r, s);
        prop_assume!(v.is_finite() && v.abs() < 1e6);
        let (_, n1) = polynomial_pair(&case_iv_params(r, s)).unwrap();
        let width = rational(1, 1 << 60);
        let roots = isolate_real_roots(&n1, &Bound::NegInfinity, &Bound::PosInfinity, &width).unwrap();
        let nearest = roots.iter().map(|iv| iv.midpoint()).map(|x| (x - v).abs()).fold(f64::INFINITY, f64::min);
        prop_assert!(nearest <= 1e-10 * (1.0 + v.abs()), "formula {v}, nearest root off by {nearest}");
    }

    #[test]
    fn q_kappa_has_one_root_per_region(k in prop::array::uniform3(1i64..1000)) {
        let mut k = k;
        k.sort();
        prop_assume!(k[0] < k[1] && k[1] < k[2]);
        let fam = q_kappa_family([rational(k[0], 1000), rational(k[1], 1000), rational(k[2], 1000)]).unwrap();
        let regions = parametric_root_regions(&fam, (1.0, f64::INFINITY), (0.0, 1.0)).unwrap();
        for reg in &regions {
            prop_assert_eq!(reg.count, 1, "region ({}, {})", reg.lo, reg.hi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn realized_counts_stay_below_ceiling(seed in any::<u64>(), m in 1usize..=3) {
        let table = realizable_table(m, false);
        let (i, j) = table[(seed % table.len() as u64) as usize];
        match realize_seeded(i, j, m, false, seed) {
            Ok(spec) => {
                let c = verify_spec(&spec).unwrap();
                prop_assert!(c.certified);
                prop_assert!(c.m1 <= m + 3 && c.n1 <= m + 3);
                prop_assert_eq!((c.m1, c.n1), (i, j));
            }
            // m = 2 [[5,0]] has no certified design; the best attempt must still respect the ceiling
            Err(Error::RealizeFailed { got_i, got_j, .. }) => {
                prop_assert_eq!((m, i, j), (2, 5, 0));
                prop_assert!(got_i <= m + 3 && got_j <= m + 3);
            }
            Err(e) => prop_assert!(false, "realize({i}, {j}, {m}) failed: {e}"),
        }
    }
}
