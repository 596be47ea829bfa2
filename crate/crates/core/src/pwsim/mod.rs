//! Direct simulation of `ż = i(z² - 1)/2 + ε R±(z, z̄)` with `R⁺` above and `R⁻` below
//! the switching line `Σ = {Im z = 0}`.
//!
//! Orbits cross `Σ` transversally (Filippov crossing); a point where the two one-sided
//! fields have opposite normal components is reported as sliding and not followed.
//! Each nest has a section on the real segment between its center and `0`, where the
//! linearizing map `φ` sends the section point to the `w`-radius. Limit cycles are the
//! fixed points of the return map on that section.
//!
//! Sign convention: near a simple zero `r₀` of the averaged function `M` of a nest
//! (`M₁` for the left, `N₁` for the right), the radial displacement of one return is
//! `σ 2π ε M(r) + O(ε²)` with `σ = -1` on the left nest, where orbits turn clockwise in
//! `w`, and `σ = +1` on the right nest, where they turn counterclockwise. Hence
//! `sign(P′ - 1) = σ sign M′(r₀)`; see [`Nest::orientation`].

pub mod dopri;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed::Which;
use crate::designer::verify_reports;
use crate::error::{Error, Result};
use crate::perturbation::{melnikov_params, PerturbationSpec, Side, MAX_CLOSED_DEGREE};
use crate::rootkit::isolate::SpanFunction;
use dopri::{Stepper, Tolerances};

/// Largest `ε` accepted without [`SimConfig::allow_large_epsilon`].
pub const EPSILON_GUARD: f64 = 0.1;
/// Orbits farther than this from the origin count as escaped.
const ESCAPE_RADIUS: f64 = 1e9;
/// Finite-difference step for `P′`, in section coordinates.
const DERIVATIVE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nest {
    /// Around `z = -1`; averaged function `M₁`.
    Left,
    /// Around `z = +1`; averaged function `N₁`.
    Right,
}

impl std::str::FromStr for Nest {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Nest::Left),
            "right" => Ok(Nest::Right),
            other => Err(Error::InvalidSpec(format!("unknown nest '{other}', expected left or right"))),
        }
    }
}

impl Nest {
    pub fn center(self) -> f64 {
        match self {
            Nest::Left => -1.0,
            Nest::Right => 1.0,
        }
    }

    pub fn phi(self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Nest::Left => (one + z) / (one - z),
            Nest::Right => (one - z) / (one + z),
        }
    }

    pub fn phi_inverse(self, w: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Nest::Left => (w - one) / (w + one),
            Nest::Right => (one - w) / (one + w),
        }
    }

    /// Open section interval on the real axis.
    pub fn section(self) -> (f64, f64) {
        match self {
            Nest::Left => (-1.0, 0.0),
            Nest::Right => (0.0, 1.0),
        }
    }

    /// Sign `σ` of the one-return displacement relative to `2π ε M(r)`.
    pub fn orientation(self) -> f64 {
        match self {
            Nest::Left => -1.0,
            Nest::Right => 1.0,
        }
    }

    pub fn which(self) -> Which {
        match self {
            Nest::Left => Which::M1,
            Nest::Right => Which::N1,
        }
    }

    fn in_section(self, x: f64) -> bool {
        let (lo, hi) = self.section();
        x > lo && x < hi
    }

    /// Whether a real crossing lies on the far branch of the nest (beyond the center).
    fn on_far_branch(self, x: f64) -> bool {
        match self {
            Nest::Left => x < -1.0,
            Nest::Right => x > 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub epsilon: f64,
    pub rk_tol: f64,
    pub event_tol: f64,
    pub max_steps: usize,
    pub nest: Nest,
    /// Accepts `ε > 0.1` with a warning instead of an error.
    pub allow_large_epsilon: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { epsilon: 1e-3, rk_tol: 1e-10, event_tol: 1e-12, max_steps: 200_000, nest: Nest::Left, allow_large_epsilon: false }
    }
}

impl SimConfig {
    /// Checks the configuration and returns any warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::Domain(format!("epsilon must be finite and nonnegative, got {}", self.epsilon)));
        }
        if !(self.rk_tol > 0.0) || !(self.event_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Domain("max_steps must be positive".into()));
        }
        let mut warnings = Vec::new();
        if self.epsilon > EPSILON_GUARD {
            if !self.allow_large_epsilon {
                return Err(Error::Domain(format!(
                    "epsilon = {} exceeds {EPSILON_GUARD}, outside the averaging regime (override with allow_large_epsilon)",
                    self.epsilon
                )));
            }
            warnings.push(format!("epsilon = {} exceeds {EPSILON_GUARD}; averaging predictions may not apply", self.epsilon));
        }
        Ok(warnings)
    }
}

/// The two one-sided vector fields.
#[derive(Clone, Copy)]
struct Field<'a> {
    spec: &'a PerturbationSpec,
    epsilon: f64,
}

impl Field<'_> {
    fn eval(&self, side: Side, z: Complex64) -> Complex64 {
        let base = Complex64::new(0.0, 0.5) * (z * z - 1.0);
        if self.epsilon == 0.0 {
            base
        } else {
            base + self.epsilon * self.spec.eval(side, z)
        }
    }

    /// Region entered from a real point, or a sliding error.
    fn side_from(&self, x: f64) -> Result<Side> {
        let z = Complex64::new(x, 0.0);
        let (p, m) = (self.eval(Side::Plus, z).im, self.eval(Side::Minus, z).im);
        if p > 0.0 && m > 0.0 {
            Ok(Side::Plus)
        } else if p < 0.0 && m < 0.0 {
            Ok(Side::Minus)
        } else {
            Err(Error::Sliding { at: z })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub x: f64,
    /// `Im` of the upper and lower fields at the crossing.
    pub im_plus: f64,
    pub im_minus: f64,
    /// Region entered.
    pub into: Side,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Trajectory {
    pub points: Vec<(f64, Complex64)>,
    pub crossings: Vec<Crossing>,
}

struct Run {
    trajectory: Trajectory,
    t: f64,
}

fn run(field: Field<'_>, cfg: &SimConfig, z0: Complex64, t_max: f64, max_crossings: usize, record: bool) -> Result<Run> {
    let mut traj = Trajectory::default();
    if record {
        traj.points.push((0.0, z0));
    }
    let f_plus = field.eval(Side::Plus, z0);
    let f_minus = field.eval(Side::Minus, z0);
    if f_plus.norm() == 0.0 && f_minus.norm() == 0.0 {
        if record {
            traj.points.push((t_max, z0));
        }
        return Ok(Run { trajectory: traj, t: t_max });
    }
    let mut side = if z0.im > 0.0 {
        Side::Plus
    } else if z0.im < 0.0 {
        Side::Minus
    } else {
        field.side_from(z0.re)?
    };
    let tol = Tolerances { rtol: cfg.rk_tol, atol: cfg.rk_tol };
    let (mut t, mut z) = (0.0, z0);
    let mut steps = 0usize;
    let mut h_hint: Option<f64> = None;
    'passage: while t < t_max {
        let s = side;
        let mut stepper = Stepper::new(move |_, y| field.eval(s, y), t, z, tol);
        if let Some(h) = h_hint {
            stepper.set_step(h);
        }
        let sign = s.sign();
        while stepper.t < t_max {
            steps += 1;
            if steps > cfg.max_steps {
                return Err(Error::StepLimit(cfg.max_steps));
            }
            let step = stepper.step(t_max - stepper.t)?;
            if step.y1.norm() > ESCAPE_RADIUS || !step.y1.norm().is_finite() {
                return Err(Error::Escape(format!("|z| exceeded {ESCAPE_RADIUS:e} at t = {}", step.t1())));
            }
            if step.y1.im * sign > 0.0 {
                if record {
                    traj.points.push((step.t1(), step.y1));
                }
                continue;
            }
            // the step ends on or across Σ: locate the crossing on the interpolant
            let (mut lo, mut hi) = (step.t0, step.t1());
            let mut zc = step.y1;
            for _ in 0..200 {
                if zc.im.abs() <= cfg.event_tol || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let zm = step.at(mid);
                if zm.im * sign > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                    zc = zm;
                }
            }
            t = hi;
            z = Complex64::new(zc.re, 0.0);
            let (p, m) = (field.eval(Side::Plus, z).im, field.eval(Side::Minus, z).im);
            side = field.side_from(z.re)?;
            traj.crossings.push(Crossing { t, x: z.re, im_plus: p, im_minus: m, into: side });
            if record {
                traj.points.push((t, z));
            }
            h_hint = Some(step.h);
            if traj.crossings.len() >= max_crossings {
                break 'passage;
            }
            continue 'passage;
        }
        t = stepper.t;
        z = stepper.y;
    }
    Ok(Run { trajectory: traj, t })
}

/// Integrates the piecewise system from `z0` up to `t_max`, recording every crossing of `Σ`.
pub fn integrate_piecewise(spec: &PerturbationSpec, cfg: &SimConfig, z0: Complex64, t_max: f64) -> Result<Trajectory> {
    cfg.validate()?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("t_max must be positive and finite, got {t_max}")));
    }
    let field = Field { spec, epsilon: cfg.epsilon };
    Ok(run(field, cfg, z0, t_max, usize::MAX, true)?.trajectory)
}

/// One return to the section, with its time and both crossings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Return {
    pub x: f64,
    pub period: f64,
    pub far_crossing: f64,
}

/// Time bound for one return; unperturbed returns take `2π`.
const RETURN_TIME_LIMIT: f64 = 100.0;

pub fn poincare_return(spec: &PerturbationSpec, cfg: &SimConfig, x0: f64) -> Result<Return> {
    let nest = cfg.nest;
    if !nest.in_section(x0) {
        let (lo, hi) = nest.section();
        return Err(Error::Domain(format!("section point {x0} is not in ({lo}, {hi})")));
    }
    let field = Field { spec, epsilon: cfg.epsilon };
    let out = run(field, cfg, Complex64::new(x0, 0.0), RETURN_TIME_LIMIT, 2, false)?;
    let c = &out.trajectory.crossings;
    if c.len() < 2 {
        return Err(Error::Escape(format!("no return to the section from {x0} within t = {RETURN_TIME_LIMIT}")));
    }
    if !nest.on_far_branch(c[0].x) {
        return Err(Error::Escape(format!("first crossing at {} is not beyond the center", c[0].x)));
    }
    if !nest.in_section(c[1].x) {
        return Err(Error::Escape(format!("return at {} is outside the section", c[1].x)));
    }
    Ok(Return { x: c[1].x, period: out.t, far_crossing: c[0].x })
}

/// First-return map on the section of `cfg.nest`.
pub fn poincare_map(spec: &PerturbationSpec, cfg: &SimConfig, x0: f64) -> Result<f64> {
    cfg.validate()?;
    Ok(poincare_return(spec, cfg, x0)?.x)
}

/// Section point of the unperturbed orbit of `w`-radius `r0`.
pub fn predicted_cycle_location(r0: f64, nest: Nest) -> Result<f64> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::Domain(format!("radius {r0} is not in (0,1)")));
    }
    Ok(match nest {
        Nest::Left => (r0 - 1.0) / (r0 + 1.0),
        Nest::Right => -(r0 - 1.0) / (r0 + 1.0),
    })
}

pub fn radius_in_w(x: f64, nest: Nest) -> f64 {
    nest.phi(Complex64::new(x, 0.0)).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleReport {
    pub section_point: f64,
    pub radius_in_w: f64,
    /// Nearest certified zero of the nest's averaged function, when available.
    pub predicted_r0: Option<f64>,
    pub deviation: Option<f64>,
    pub p_prime: f64,
    pub stable: bool,
    /// `|P′ - 1|` exceeds ten times the finite-difference noise floor.
    pub hyperbolic: bool,
    pub noise_floor: f64,
    /// Derivative of the averaged function at `predicted_r0`.
    pub melnikov_slope: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CycleSearch {
    pub cycles: Vec<CycleReport>,
    /// The return map is the identity to within noise on every seed (a center).
    pub degenerate_identity: bool,
}

/// Certified simple zeros of the averaged function of `nest`, with the function itself.
fn melnikov_zeros(spec: &PerturbationSpec, nest: Nest) -> Option<(Vec<f64>, SpanFunction)> {
    if spec.m() > MAX_CLOSED_DEGREE {
        return None;
    }
    let p = melnikov_params(spec).ok()?;
    let (rm, rn) = verify_reports(&p, spec.m(), spec.holomorphic()).ok()?;
    let rep = if nest == Nest::Left { rm } else { rn };
    rep.certified_simple_count()?;
    let f = if spec.holomorphic() && spec.m() >= 1 {
        let h = crate::closed::HolomorphicParams::from_params(&p).ok()?;
        SpanFunction::holomorphic(&h, nest.which())
    } else if nest == Nest::Left {
        SpanFunction::m1(&p)
    } else {
        SpanFunction::n1(&p)
    };
    Some((rep.zeros.iter().map(|z| z.location).collect(), f))
}

fn bisect(d: &(dyn Fn(f64) -> Result<f64> + Sync), mut lo: f64, mut hi: f64, mut dlo: f64, tol: f64) -> Result<f64> {
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        let dm = d(mid)?;
        if dm == 0.0 {
            return Ok(mid);
        }
        if (dm > 0.0) == (dlo > 0.0) {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    if (hi - lo).abs() <= 1e3 * tol.max(f64::EPSILON) {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::NonConvergence(format!("bisection stalled on [{lo}, {hi}]")))
    }
}

/// Geometric seed radii in `[r_lo, r_hi]`.
pub fn seed_radii(r_lo: f64, r_hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| r_lo * (r_hi / r_lo).powf(k as f64 / (n - 1) as f64)).collect()
}

/// Fixed points of the return map between the `w`-radii `search.0` and `search.1`.
pub fn find_limit_cycles(spec: &PerturbationSpec, cfg: &SimConfig, search: (f64, f64), n_seeds: usize) -> Result<CycleSearch> {
    cfg.validate()?;
    let (r_lo, r_hi) = search;
    if !(r_lo > 0.0 && r_lo < r_hi && r_hi < 1.0) {
        return Err(Error::Domain(format!("search window ({r_lo}, {r_hi}) must satisfy 0 < lo < hi < 1")));
    }
    if n_seeds < 2 {
        return Err(Error::Domain("at least two seeds are needed".into()));
    }
    let nest = cfg.nest;
    let disp = |x: f64| -> Result<f64> { Ok(poincare_return(spec, cfg, x)?.x - x) };
    let seeds: Vec<f64> = seed_radii(r_lo, r_hi, n_seeds)
        .into_iter()
        .map(|r| predicted_cycle_location(r, nest))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = seeds.par_iter().map(|&x| disp(x)).collect::<Result<_>>()?;
    let noise = 100.0 * cfg.rk_tol;
    if values.iter().all(|v| v.abs() <= noise) {
        return Ok(CycleSearch { cycles: Vec::new(), degenerate_identity: true });
    }
    let brackets: Vec<(f64, f64, f64)> = (0..n_seeds - 1)
        .filter(|&k| values[k] != 0.0 && (values[k] > 0.0) != (values[k + 1] > 0.0))
        .map(|k| (seeds[k], seeds[k + 1], values[k]))
        .collect();
    let melnikov = melnikov_zeros(spec, nest);
    let mut cycles: Vec<CycleReport> = brackets
        .par_iter()
        .map(|&(a, b, da)| -> Result<CycleReport> {
            let x = bisect(&disp, a, b, da, cfg.event_tol)?;
            let h = DERIVATIVE_STEP.min(0.5 * (x - nest.section().0).abs()).min(0.5 * (nest.section().1 - x).abs());
            let p_prime = (poincare_return(spec, cfg, x + h)?.x - poincare_return(spec, cfg, x - h)?.x) / (2.0 * h);
            // noise in P from the gap to a ten times tighter integration
            let fine = SimConfig { rk_tol: 0.1 * cfg.rk_tol, ..*cfg };
            let gap = (poincare_return(spec, &fine, x)?.x - poincare_return(spec, cfg, x)?.x).abs();
            let noise_floor = gap.max(f64::EPSILON) / h;
            let radius = radius_in_w(x, nest);
            let nearest = melnikov.as_ref().and_then(|(zs, _)| {
                zs.iter().copied().min_by(|p, q| (p - radius).abs().total_cmp(&(q - radius).abs()))
            });
            let slope = match (&melnikov, nearest) {
                (Some((_, f)), Some(r0)) => Some(slope_of(f, r0)),
                _ => None,
            };
            Ok(CycleReport {
                section_point: x,
                radius_in_w: radius,
                predicted_r0: nearest,
                deviation: nearest.map(|r0| (radius - r0).abs()),
                p_prime,
                stable: p_prime.abs() < 1.0,
                hyperbolic: (p_prime - 1.0).abs() > 10.0 * noise_floor,
                noise_floor,
                melnikov_slope: slope,
            })
        })
        .collect::<Result<_>>()?;
    cycles.sort_by(|p, q| p.radius_in_w.total_cmp(&q.radius_in_w));
    Ok(CycleSearch { cycles, degenerate_identity: false })
}

fn slope_of(f: &SpanFunction, r: f64) -> f64 {
    let h = 1e-6 * r.min(1.0 - r);
    (f.eval(r + h) - f.eval(r - h)) / (2.0 * h)
}

/// Whether the stability of a cycle agrees with the averaged prediction
/// `sign(P′ - 1) = σ sign(M′(r₀))` (see the module notes). `P′` does not depend on
/// whether the section is parametrized by `x` or by the `w`-radius.
pub fn slope_agrees(report: &CycleReport, nest: Nest) -> Option<bool> {
    let s = report.melnikov_slope?;
    Some((report.p_prime - 1.0).signum() == nest.orientation() * s.signum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::params_to_perturbation;
    use crate::perturbation::MelnikovParams;

    fn m0_spec() -> PerturbationSpec {
        params_to_perturbation(&MelnikovParams { a: 1.0, b: -0.5, c: -1.0, ..Default::default() }, 0, false).unwrap()
    }

    fn unperturbed() -> SimConfig {
        SimConfig { epsilon: 0.0, ..Default::default() }
    }

    #[test]
    fn predicted_locations() {
        assert!((predicted_cycle_location(0.5, Nest::Left).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        assert!((predicted_cycle_location(1e-12, Nest::Left).unwrap() + 1.0).abs() < 1e-11);
        assert!((predicted_cycle_location(0.780776, Nest::Left).unwrap() + 0.219224 / 1.780776).abs() < 1e-15);
        assert!((predicted_cycle_location(0.780776, Nest::Left).unwrap() + 0.1231059).abs() < 1e-7);
        assert!((predicted_cycle_location(0.5, Nest::Right).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(predicted_cycle_location(1.0, Nest::Left).is_err());
        assert!((radius_in_w(1.0 / 3.0, Nest::Right) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn config_guard() {
        let cfg = SimConfig { epsilon: 0.2, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = SimConfig { allow_large_epsilon: true, ..cfg };
        assert_eq!(cfg.validate().unwrap().len(), 1);
        assert!(SimConfig { rk_tol: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn equilibrium_is_stationary() {
        let spec = PerturbationSpec::zero(0, false);
        let tr = integrate_piecewise(&spec, &unperturbed(), Complex64::new(-1.0, 0.0), 10.0).unwrap();
        assert!(tr.points.iter().all(|(_, z)| *z == Complex64::new(-1.0, 0.0)));
        assert!(tr.crossings.is_empty());
    }

    #[test]
    fn unperturbed_orbit_is_a_circle() {
        let spec = PerturbationSpec::zero(0, false);
        let tr = integrate_piecewise(&spec, &unperturbed(), Complex64::new(-1.0 / 3.0, 0.0), 2.0 * std::f64::consts::PI).unwrap();
        let drift = tr.points.iter().map(|(_, z)| (Nest::Left.phi(*z).norm() - 0.5).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-8, "drift {drift}");
        assert!((tr.crossings[0].x + 3.0).abs() < 1e-9);
        assert!((tr.crossings[1].x + 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn unperturbed_map_is_identity() {
        let spec = PerturbationSpec::zero(0, false);
        let ret = poincare_return(&spec, &unperturbed(), -1.0 / 3.0).unwrap();
        assert!((ret.x + 1.0 / 3.0).abs() < 1e-9);
        assert!((ret.period - 2.0 * std::f64::consts::PI).abs() < 1e-8);
        let cfg = SimConfig { nest: Nest::Right, ..unperturbed() };
        assert!((poincare_map(&spec, &cfg, 0.25).unwrap() - 0.25).abs() < 1e-9);
        assert!(poincare_map(&spec, &cfg, -0.25).is_err());
    }

    #[test]
    fn zero_spec_is_degenerate_identity() {
        let spec = PerturbationSpec::zero(1, false);
        let out = find_limit_cycles(&spec, &SimConfig::default(), (0.1, 0.9), 8).unwrap();
        assert!(out.cycles.is_empty());
        assert!(out.degenerate_identity);
    }

    #[test]
    fn displacement_changes_sign_at_prediction() {
        let spec = m0_spec();
        let cfg = SimConfig::default();
        let x_star = predicted_cycle_location(0.780776, Nest::Left).unwrap();
        let below = poincare_map(&spec, &cfg, x_star - 0.02).unwrap() - (x_star - 0.02);
        let above = poincare_map(&spec, &cfg, x_star + 0.02).unwrap() - (x_star + 0.02);
        assert!(below * above < 0.0);
    }

    #[test]
    fn m0_cycle_found_with_expected_sign() {
        let spec = m0_spec();
        let out = find_limit_cycles(&spec, &SimConfig::default(), (0.1, 0.95), 16).unwrap();
        assert_eq!(out.cycles.len(), 1);
        let c = out.cycles[0];
        assert!(c.deviation.unwrap() < 50.0 * 1e-3);
        assert!(c.hyperbolic);
        assert_eq!(slope_agrees(&c, Nest::Left), Some(true));
    }

    #[test]
    fn right_nest_has_opposite_orientation() {
        let spec = crate::perturbation::reflect(&m0_spec());
        let cfg = SimConfig { nest: Nest::Right, ..SimConfig::default() };
        let out = find_limit_cycles(&spec, &cfg, (0.1, 0.95), 16).unwrap();
        assert_eq!(out.cycles.len(), 1);
        let c = out.cycles[0];
        assert!(c.deviation.unwrap() < 50.0 * 1e-3);
        assert!(c.hyperbolic);
        assert_eq!(slope_agrees(&c, Nest::Right), Some(true));
        let left = find_limit_cycles(&m0_spec(), &SimConfig::default(), (0.1, 0.95), 16).unwrap().cycles[0];
        assert_eq!((c.p_prime > 1.0), !(left.p_prime > 1.0));
    }

    #[test]
    fn sliding_is_reported() {
        // a large constant upward push on the lower field near the center makes both fields
        // point into Σ from below-left of the center
        let mut spec = PerturbationSpec::zero(0, false);
        spec.set(Side::Minus, 0, 0, Complex64::new(0.0, -1.0)).unwrap();
        let cfg = SimConfig { epsilon: 0.1, ..Default::default() };
        let err = integrate_piecewise(&spec, &cfg, Complex64::new(-0.99, 0.0), 1.0).unwrap_err();
        assert!(matches!(err, Error::Sliding { .. }));
    }
}
