use melnikov_lab::perturbation::{params_to_perturbation, MelnikovParams, PerturbationSpec};
use melnikov_lab::pwsim::{find_limit_cycles, integrate_piecewise, predicted_cycle_location, Nest, SimConfig};
use num_complex::Complex64;
use proptest::prelude::*;

fn nest() -> impl Strategy<Value = Nest> {
    prop_oneof![Just(Nest::Left), Just(Nest::Right)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn unperturbed_orbits_keep_their_radius(r0 in 0.05f64..0.95, nest in nest()) {
        let cfg = SimConfig { epsilon: 0.0, nest, ..SimConfig::default() };
        let x0 = predicted_cycle_location(r0, nest).unwrap();
        let tr = integrate_piecewise(&PerturbationSpec::zero(0, false), &cfg, Complex64::new(x0, 0.0), 2.0 * std::f64::consts::PI).unwrap();
        let drift = tr.points.iter().map(|(_, z)| (nest.phi(*z).norm() - r0).abs()).fold(0.0, f64::max);
        prop_assert!(drift < 1e-8, "drift {drift}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// `M₁ = a(1 - r²) + b r` has the single zero `r₀` when `b = a(r₀² - 1)/r₀`.
    #[test]
    fn cycles_cross_the_switching_line_twice(r0 in 0.2f64..0.8, nest in nest()) {
        let b = (r0 * r0 - 1.0) / r0;
        let p = MelnikovParams { a: 1.0, b, c: -1.0, ..Default::default() };
        let p = match nest {
            Nest::Left => p,
            Nest::Right => MelnikovParams { a: -1.0, b, c: 1.0, ..Default::default() },
        };
        let spec = params_to_perturbation(&p, 0, false).unwrap();
        let cfg = SimConfig { nest, ..SimConfig::default() };
        let found = find_limit_cycles(&spec, &cfg, (0.1, 0.9), 16).unwrap();
        prop_assert_eq!(found.cycles.len(), 1);
        let c = found.cycles[0];
        prop_assert!(c.deviation.unwrap() < 50.0 * cfg.epsilon);
        prop_assert!(c.hyperbolic);
        let period = melnikov_lab::pwsim::poincare_return(&spec, &cfg, c.section_point).unwrap().period;
        let tr = integrate_piecewise(&spec, &cfg, Complex64::new(c.section_point, 0.0), period - 1e-6).unwrap();
        prop_assert_eq!(tr.crossings.len(), 1);
        let tr = integrate_piecewise(&spec, &cfg, Complex64::new(c.section_point, 0.0), period + 1e-3).unwrap();
        prop_assert_eq!(tr.crossings.len(), 2);
    }
}
