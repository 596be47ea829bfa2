//! Averaged functions by direct numerical integration over the linearized circle.
//!
//! For a center with linearizing conformal map `w = φ(z)`,
//!
//! ```text
//! M₁±(r) = -Im ∫₀^{±π} conj(φ'(φ⁻¹(w)) R±(φ⁻¹(w), conj φ⁻¹(w))) i e^{iθ} dθ,  w = r e^{iθ}
//! ```
//!
//! and `M₁ = M₁⁺ - M₁⁻`. The integrand is assembled from the generic double sum of the
//! perturbation, so any degree works.
//!
//! Orientation: the formula assumes `φ' f = -i φ` and that the upper half of the `w`
//! circle lies over `Im z > 0`. A [`LinearizedSystem`] records when either is flipped
//! (the right-hand center of the model and `ż = iz` both rotate the other way) and the
//! evaluator compensates, so for the model the right-hand system yields `N₁` directly.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perturbation::{PerturbationSpec, Side};

pub type ComplexMap = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub struct LinearizedSystem {
    pub name: String,
    pub phi: ComplexMap,
    pub phi_prime: ComplexMap,
    pub phi_inverse: ComplexMap,
    pub center: Complex64,
    /// `+1` when `φ' f = -iφ`, `-1` when `φ' f = +iφ`.
    pub orientation: f64,
    /// Which half-plane of `z` lies over the upper half of the `w` circle.
    pub upper_side: Side,
    /// Largest radius the circle may take inside the linearization domain.
    pub r_max: f64,
    pub domain_note: String,
}

impl std::fmt::Debug for LinearizedSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearizedSystem")
            .field("name", &self.name)
            .field("center", &self.center)
            .field("orientation", &self.orientation)
            .field("upper_side", &self.upper_side)
            .field("r_max", &self.r_max)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Iz,
    HalfIZ2Minus1Left,
    HalfIZ2Minus1Right,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iz" => Ok(Model::Iz),
            "half-i-z2-minus-1-left" | "left" => Ok(Model::HalfIZ2Minus1Left),
            "half-i-z2-minus-1-right" | "right" => Ok(Model::HalfIZ2Minus1Right),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

/// Radius cap for the model systems: `φ⁻¹` has a pole at `w = -1`.
pub const MODEL_R_MAX: f64 = 1.0 - 1e-6;

fn c1() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

pub fn builtin_system(model: Model) -> LinearizedSystem {
    match model {
        Model::Iz => LinearizedSystem {
            name: "iz".into(),
            phi: Arc::new(|z| z),
            phi_prime: Arc::new(|_| c1()),
            phi_inverse: Arc::new(|w| w),
            center: Complex64::new(0.0, 0.0),
            orientation: -1.0,
            upper_side: Side::Plus,
            r_max: f64::INFINITY,
            domain_note: "whole plane; f(z) = iz is already linear".into(),
        },
        Model::HalfIZ2Minus1Left => LinearizedSystem {
            name: "half-i-z2-minus-1-left".into(),
            phi: Arc::new(|z| (c1() + z) / (c1() - z)),
            phi_prime: Arc::new(|z| Complex64::new(2.0, 0.0) / ((z - c1()) * (z - c1()))),
            phi_inverse: Arc::new(|w| (w - c1()) / (w + c1())),
            center: Complex64::new(-1.0, 0.0),
            orientation: 1.0,
            upper_side: Side::Plus,
            r_max: MODEL_R_MAX,
            domain_note: "half-plane Re z < 0, mapped onto the unit disc".into(),
        },
        Model::HalfIZ2Minus1Right => LinearizedSystem {
            name: "half-i-z2-minus-1-right".into(),
            phi: Arc::new(|z| (c1() - z) / (c1() + z)),
            phi_prime: Arc::new(|z| Complex64::new(-2.0, 0.0) / ((z + c1()) * (z + c1()))),
            phi_inverse: Arc::new(|w| (c1() - w) / (c1() + w)),
            center: Complex64::new(1.0, 0.0),
            orientation: -1.0,
            upper_side: Side::Minus,
            r_max: MODEL_R_MAX,
            domain_note: "half-plane Re z > 0, mapped onto the unit disc".into(),
        },
    }
}

impl LinearizedSystem {
    /// Checks `φ(φ⁻¹(w)) = w` on circles and that real points map to real points.
    pub fn validate(&self, radii: &[f64], tol: f64) -> Result<()> {
        for &r in radii {
            for j in 0..32 {
                let th = 2.0 * std::f64::consts::PI * j as f64 / 32.0 + 0.1;
                let w = Complex64::from_polar(r, th);
                let back = (self.phi)((self.phi_inverse)(w));
                if (back - w).norm() > tol * (1.0 + w.norm()) {
                    return Err(Error::Domain(format!(
                        "{}: phi(phi_inverse(w)) differs from w by {:e} at w = {w}",
                        self.name,
                        (back - w).norm()
                    )));
                }
            }
            for &x in &[-r, r] {
                let z = (self.phi_inverse)(Complex64::new(x, 0.0));
                if z.im.abs() > tol * (1.0 + z.norm()) {
                    return Err(Error::Domain(format!("{}: real axis not preserved", self.name)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    AdaptiveGaussKronrod,
    CompositeSimpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rule: Rule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum interval count for Gauss–Kronrod; panel count for Simpson.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rule: Rule::AdaptiveGaussKronrod,
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureConfig {
    pub fn simpson(panels: usize) -> Self {
        QuadratureConfig {
            rule: Rule::CompositeSimpson,
            abs_tol: f64::INFINITY,
            rel_tol: f64::INFINITY,
            max_subdivisions: panels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::Domain("quadrature tolerances must be positive and subdivisions >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive 7/15-point Gauss–Kronrod on `[a, b]`.
pub fn integrate_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Integral> {
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Domain("integrand is not finite on the circle".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Integral { value: total, error: err, evaluations });
        }
        if pieces.len() >= max_subdivisions {
            return Err(Error::QuadratureFailure { estimate: err, subdivisions: pieces.len() });
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

/// Composite Simpson with `panels` panels (rounded up to even).
pub fn integrate_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> Integral {
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    Integral { value: s * h / 3.0, error: f64::NAN, evaluations: n + 1 }
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    match cfg.rule {
        Rule::AdaptiveGaussKronrod => integrate_gk(f, a, b, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions),
        Rule::CompositeSimpson => Ok(integrate_simpson(f, a, b, cfg.max_subdivisions)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub m1_plus: f64,
    pub m1_minus: f64,
    pub m1: f64,
    pub error: f64,
}

/// One half-circle integral `-Im ∫₀^{end} conj(φ'(z) R(z, z̄)) i e^{iθ} dθ` using the
/// perturbation of `side`.
fn half_integral(system: &LinearizedSystem, spec: &PerturbationSpec, side: Side, r: f64, end: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    let integrand = |th: f64| {
        let e = Complex64::from_polar(1.0, th);
        let z = (system.phi_inverse)(e * r);
        let v = ((system.phi_prime)(z) * spec.eval(side, z)).conj() * Complex64::new(0.0, 1.0) * e;
        v.im
    };
    let res = integrate(integrand, 0.0, end, cfg)?;
    Ok(Integral { value: -res.value, ..res })
}

pub fn melnikov_quadrature(system: &LinearizedSystem, spec: &PerturbationSpec, r: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r = {r} is outside (0,1)")));
    }
    if r > system.r_max {
        return Err(Error::Domain(format!(
            "r = {r} exceeds the linearization radius {} of {} (pole of the inverse map)",
            system.r_max, system.name
        )));
    }
    let pi = std::f64::consts::PI;
    let upper = half_integral(system, spec, system.upper_side, r, pi, cfg)?;
    let lower = half_integral(system, spec, system.upper_side.other(), r, -pi, cfg)?;
    let (m_plus, m_minus) = (system.orientation * upper.value, system.orientation * lower.value);
    Ok(QuadratureResult {
        m1_plus: m_plus,
        m1_minus: m_minus,
        m1: m_plus - m_minus,
        error: upper.error + lower.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_exact() {
        let r = integrate_gk(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-14, 1e-14, 10).unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn gk_adapts_to_peak() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        let r = integrate_gk(f, -1.0, 1.0, 1e-10, 1e-12, 500).unwrap();
        assert!((r.value - exact).abs() < 1e-8 * exact);
        assert!(matches!(integrate_gk(f, -1.0, 1.0, 1e-14, 1e-16, 2), Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn simpson_fourth_order() {
        let exact = 1.0 - (1.0f64).cos();
        let e1 = (integrate_simpson(f64::sin, 0.0, 1.0, 8).value - exact).abs();
        let e2 = (integrate_simpson(f64::sin, 0.0, 1.0, 16).value - exact).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn builtin_maps() {
        let left = builtin_system(Model::HalfIZ2Minus1Left);
        let z0 = Complex64::new(0.0, 0.0);
        assert_eq!((left.phi)(z0), c1());
        assert_eq!((left.phi_inverse)(z0), -c1());
        assert_eq!((left.phi_prime)(z0), Complex64::new(2.0, 0.0));
        let v = (left.phi)(Complex64::new(0.3, 0.0));
        assert_eq!(v.im, 0.0);
        assert!((v.re - 1.3 / 0.7).abs() < 1e-15);
        let p = Complex64::new(0.2, 0.5);
        assert!(((left.phi)((left.phi_inverse)(p)) - p).norm() < 1e-14);
        for m in [Model::Iz, Model::HalfIZ2Minus1Left, Model::HalfIZ2Minus1Right] {
            builtin_system(m).validate(&[0.1, 0.5, 0.9], 1e-12).unwrap();
        }
        assert!(matches!("nope".parse::<Model>(), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn linearization_identity() {
        // φ'(z) f(z) = -i σ φ(z) with σ the recorded orientation
        for m in [Model::Iz, Model::HalfIZ2Minus1Left, Model::HalfIZ2Minus1Right] {
            let s = builtin_system(m);
            let f = |z: Complex64| match m {
                Model::Iz => Complex64::new(0.0, 1.0) * z,
                _ => Complex64::new(0.0, 0.5) * (z * z - c1()),
            };
            for z in [Complex64::new(-0.4, 0.3), Complex64::new(0.6, -0.2), Complex64::new(-0.1, -0.7)] {
                let lhs = (s.phi_prime)(z) * f(z);
                let rhs = Complex64::new(0.0, -s.orientation) * (s.phi)(z);
                assert!((lhs - rhs).norm() < 1e-13, "{m:?}");
            }
        }
    }

    #[test]
    fn zero_spec_and_domain() {
        let left = builtin_system(Model::HalfIZ2Minus1Left);
        let cfg = QuadratureConfig::default();
        let spec = PerturbationSpec::zero(2, false);
        let q = melnikov_quadrature(&left, &spec, 0.4, &cfg).unwrap();
        assert_eq!((q.m1_plus, q.m1_minus, q.m1), (0.0, 0.0, 0.0));
        assert!(matches!(melnikov_quadrature(&left, &spec, 1.0, &cfg), Err(Error::Domain(_))));
        assert!(matches!(melnikov_quadrature(&left, &spec, 1.0 - 1e-7, &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn left_model_m0_example() {
        let left = builtin_system(Model::HalfIZ2Minus1Left);
        let mut spec = PerturbationSpec::zero(0, false);
        spec.set(Side::Plus, 0, 0, Complex64::new(0.0, 1.0)).unwrap();
        let q = melnikov_quadrature(&left, &spec, 0.5, &QuadratureConfig::default()).unwrap();
        assert!((q.m1 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn smooth_perturbation_of_rotation() {
        // plus = minus: the two halves join into the full-period integral.
        let s = builtin_system(Model::Iz);
        let cfg = QuadratureConfig::default();
        let r = 0.6;
        // R(z, z̄) = z̄ (a_{1,1} = 1): the full-period integrand averages to zero
        let mut conj_z = PerturbationSpec::zero(1, false);
        conj_z.set(Side::Plus, 1, 1, c1()).unwrap();
        conj_z.set(Side::Minus, 1, 1, c1()).unwrap();
        let q = melnikov_quadrature(&s, &conj_z, r, &cfg).unwrap();
        assert!(q.m1.abs() < 1e-12);
        // R(z, z̄) = z: ż = iz + εz has dr/dθ = εr, so M₁ = 2πr
        let mut z_only = PerturbationSpec::zero(1, false);
        z_only.set(Side::Plus, 0, 1, c1()).unwrap();
        z_only.set(Side::Minus, 0, 1, c1()).unwrap();
        let q = melnikov_quadrature(&s, &z_only, r, &cfg).unwrap();
        assert!((q.m1 - 2.0 * std::f64::consts::PI * r).abs() < 1e-11);
    }
}
