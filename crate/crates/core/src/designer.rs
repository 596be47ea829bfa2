//! Placing zeros of the averaged functions and certifying the resulting configuration.
//!
//! Zeros are imposed on `f = r·M₁` and `g = r·N₁` (complex case) or on `M₁`, `N₁`
//! themselves (holomorphic case). Every condition is linear in the free parameters once
//! one designated coefficient is pinned to 1, so each design is a square linear solve.
//! Targets at negative `r` fill the system without producing zeros in `(0, 1)`.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closed::{atanh, HolomorphicParams, Which};
use crate::error::{Error, Result};
use crate::perturbation::{melnikov_params, params_to_perturbation, reflect, MelnikovParams, PerturbationSpec, MAX_CLOSED_DEGREE};
use crate::rootkit::isolate::{isolate_zeros, scan_sign_changes, SpanFunction, ZeroReport, DEFAULT_TOL, UNIT_INTERVAL};
use crate::rootkit::parametric::ParametricFamily;
use crate::rootkit::poly::{isolate_real_roots, rational, rational_from_f64, sturm_count, Bound, RationalPolynomial};

/// Designs whose linear system is worse conditioned than this are refused.
pub const MAX_CONDITION: f64 = 1e12;
/// Layout attempts in [`realize`] before giving up.
pub const REALIZE_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// `r·M₁` (or `M₁`).
    F,
    /// `r·N₁` (or `N₁`).
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroTarget {
    pub location: f64,
    pub which: Target,
}

impl ZeroTarget {
    pub fn f(location: f64) -> Self {
        ZeroTarget { location, which: Target::F }
    }

    pub fn g(location: f64) -> Self {
        ZeroTarget { location, which: Target::G }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub m1: usize,
    pub n1: usize,
    pub certified: bool,
}

/// Parameter indices in `MelnikovParams::to_array` order.
const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;
const ALPHA: usize = 4;
const BETA: usize = 5;
const GAMMA: usize = 6;
const KAPPA: usize = 7;
const RHO: usize = 8;

/// Free parameters and the pinned one for a design of degree `m`.
fn layout(m: usize, holomorphic: bool) -> Result<(Vec<usize>, usize)> {
    Ok(match (m, holomorphic) {
        (0, _) => (vec![B], A),
        (1 | 2, true) => (vec![B, C], A),
        // holomorphic α lives in γ and κ in -ρ
        (3, true) => (vec![A, B, C, RHO], GAMMA),
        (1, false) => (vec![A, B, C, D], ALPHA),
        (2, false) => (vec![A, B, C, D, KAPPA, ALPHA], BETA),
        (3, false) => (vec![A, B, C, D, KAPPA, RHO, ALPHA, BETA], GAMMA),
        _ => return Err(Error::UnsupportedDegree { m, max: MAX_CLOSED_DEGREE }),
    })
}

/// Number of targets a design of degree `m` takes.
pub fn target_count(m: usize, holomorphic: bool) -> Result<usize> {
    Ok(layout(m, holomorphic)?.0.len())
}

/// Most zeros `f` (or `g`) alone can be given in one design.
pub fn per_function_cap(m: usize, holomorphic: bool) -> usize {
    match (m, holomorphic) {
        (0, _) => 1,
        (1 | 2, true) => 2,
        (_, true) => 3,
        _ => m + 3,
    }
}

/// Value of each parameter's basis function in the designed function at `r`.
fn row(m: usize, holomorphic: bool, t: &ZeroTarget) -> [f64; 9] {
    let r = t.location;
    let at = atanh(r);
    let mut v = [0.0; 9];
    if holomorphic && m >= 1 {
        // M₁ = a + b r + c r² + α r atanh r, N₁ = c + (b - κ) r + a r² + α r atanh r
        match t.which {
            Target::F => {
                v[A] = 1.0;
                v[B] = r;
                v[C] = r * r;
            }
            Target::G => {
                v[A] = r * r;
                v[B] = r;
                v[C] = 1.0;
                v[RHO] = r;
            }
        }
        v[GAMMA] = r * at;
        return v;
    }
    let s = r * r - 1.0;
    match t.which {
        Target::F => {
            v[A] = r;
            v[B] = r * r;
            v[C] = r.powi(3);
            v[D] = r.powi(4);
            v[ALPHA] = s * s * at;
            v[BETA] = (r.powi(4) - 1.0) * at;
            v[GAMMA] = r * r * at;
        }
        Target::G => {
            v[A] = r.powi(3);
            v[B] = r * r;
            v[C] = r;
            v[D] = 2.0 * r * r - r.powi(4);
            v[ALPHA] = s * s * at;
            v[BETA] = -(r.powi(4) - 1.0) * at;
            v[GAMMA] = r * r * at;
            v[KAPPA] = r.powi(4) - r * r;
            v[RHO] = r * r;
        }
    }
    v
}

fn validate_targets(targets: &[ZeroTarget]) -> Result<()> {
    for (i, t) in targets.iter().enumerate() {
        if !(t.location > -1.0 && t.location < 1.0) || t.location == 0.0 {
            return Err(Error::Domain(format!("target {i} at {} is not in (-1,1)\\{{0}}", t.location)));
        }
        for (j, u) in targets.iter().enumerate().skip(i + 1) {
            if t.location == u.location {
                return Err(Error::DegenerateTargets {
                    subset: vec![i, j],
                    reason: format!("repeated location {}", t.location),
                });
            }
        }
    }
    Ok(())
}

/// Solves for the parameters putting a zero of `f` or `g` at every target.
pub fn design(targets: &[ZeroTarget], m: usize, holomorphic: bool) -> Result<MelnikovParams> {
    let (free, pin) = layout(m, holomorphic)?;
    if targets.len() != free.len() {
        return Err(Error::WrongTargetCount { expected: free.len(), got: targets.len() });
    }
    validate_targets(targets)?;
    let n = free.len();
    let mut mat = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for (i, t) in targets.iter().enumerate() {
        let mut v = row(m, holomorphic, t);
        if m == 0 {
            // c = -a is tied to the pinned a
            v[A] -= v[C];
        }
        for (j, &p) in free.iter().enumerate() {
            mat[(i, j)] = v[p];
        }
        rhs[i] = -v[pin];
    }
    let sv = mat.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smin <= f64::EPSILON * smax * n as f64 {
        let f_rows: Vec<usize> = (0..n).filter(|&i| targets[i].which == Target::F).collect();
        let cap = per_function_cap(m, holomorphic);
        let subset = if f_rows.len() > cap {
            f_rows
        } else if n - f_rows.len() > cap {
            (0..n).filter(|&i| targets[i].which == Target::G).collect()
        } else {
            (0..n).collect()
        };
        return Err(Error::DegenerateTargets { subset, reason: "the linear system is singular".into() });
    }
    let cond = smax / smin;
    if cond > MAX_CONDITION {
        return Err(Error::IllConditioned { cond });
    }
    let sol = mat.clone().lu().solve(&rhs).ok_or_else(|| Error::DegenerateTargets {
        subset: (0..n).collect(),
        reason: "the linear system is singular".into(),
    })?;
    let residual = (&mat * &sol - &rhs).amax();
    if residual > 1e-10 * (1.0 + rhs.amax()) {
        return Err(Error::IllConditioned { cond });
    }
    let mut p = [0.0; 9];
    p[pin] = 1.0;
    for (j, &k) in free.iter().enumerate() {
        p[k] = sol[j];
    }
    if m == 0 {
        p[C] = -p[A];
    }
    Ok(MelnikovParams::from_array(p))
}

fn function_pair(params: &MelnikovParams, m: usize, holomorphic: bool) -> Result<(SpanFunction, SpanFunction)> {
    if m > MAX_CLOSED_DEGREE {
        return Err(Error::UnsupportedDegree { m, max: MAX_CLOSED_DEGREE });
    }
    let tol = 1e-12 * params.to_array().iter().fold(1.0f64, |a, b| a.max(b.abs()));
    if holomorphic {
        params.check_holomorphic(m, tol)?;
        let h = HolomorphicParams::from_params(&MelnikovParams { d: 0.0, alpha: 0.0, beta: 0.0, kappa: 0.0, ..*params })?;
        Ok((SpanFunction::holomorphic(&h, Which::M1), SpanFunction::holomorphic(&h, Which::N1)))
    } else {
        params.check_degree(m, tol)?;
        Ok((SpanFunction::m1(params), SpanFunction::n1(params)))
    }
}

/// Certified zero reports of `M₁` and `N₁` on `(0, 1)`.
pub fn verify_reports(params: &MelnikovParams, m: usize, holomorphic: bool) -> Result<(ZeroReport, ZeroReport)> {
    let (f, g) = function_pair(params, m, holomorphic)?;
    Ok((isolate_zeros(&f, UNIT_INTERVAL, DEFAULT_TOL)?, isolate_zeros(&g, UNIT_INTERVAL, DEFAULT_TOL)?))
}

pub fn verify_configuration(params: &MelnikovParams, m: usize, holomorphic: bool) -> Result<Configuration> {
    let (rm, rn) = verify_reports(params, m, holomorphic)?;
    Ok(configuration_of(&rm, &rn))
}

pub fn configuration_of(rm: &ZeroReport, rn: &ZeroReport) -> Configuration {
    Configuration {
        m1: rm.count(),
        n1: rn.count(),
        certified: rm.certified_simple_count().is_some() && rn.certified_simple_count().is_some(),
    }
}

pub fn verify_spec(spec: &PerturbationSpec) -> Result<Configuration> {
    let params = melnikov_params(spec)?;
    verify_configuration(&params, spec.m(), spec.holomorphic())
}

#[derive(Debug, Clone, Serialize)]
pub struct PolynomialCase {
    pub configuration: Configuration,
    pub bound: usize,
    pub bound_check: bool,
    /// The case-(iv) formula for the third root of `N₁`, when `m = 3`, `m₁ = 3`, `n₁ ≥ 2`.
    pub third_root: Option<f64>,
}

pub const POLYNOMIAL_BOUNDS: [usize; 4] = [1, 4, 4, 5];

/// Roots in `(0, 1)` counted with multiplicity, and whether all are simple.
fn count_with_multiplicity(p: &RationalPolynomial) -> Result<(usize, bool)> {
    if p.is_zero() {
        return Ok((0, true));
    }
    let (zero, one) = (rational(0, 1), rational(1, 1));
    let mut p = p.clone();
    for root in [&zero, &one] {
        let factor = RationalPolynomial::new(vec![-root.clone(), BigRational::one()]);
        while p.degree().unwrap_or(0) > 0 && p.eval(root).is_zero() {
            p = p.div_rem(&factor).0;
        }
    }
    if p.degree().unwrap_or(0) == 0 {
        return Ok((0, true));
    }
    let distinct = sturm_count(&p, &zero, &one)?;
    let mut total = distinct;
    let mut g = p.gcd(&p.derivative());
    while g.degree().unwrap_or(0) > 0 {
        total += sturm_count(&g, &zero, &one)?;
        g = g.gcd(&g.derivative());
    }
    Ok((total, total == distinct))
}

/// Exact `M₁`, `N₁` of the polynomial case (`α = β = γ = 0`).
pub fn polynomial_pair(p: &MelnikovParams) -> Result<(RationalPolynomial, RationalPolynomial)> {
    let q = |x: f64| rational_from_f64(x);
    let (a, b, c, d, kappa, rho) = (q(p.a)?, q(p.b)?, q(p.c)?, q(p.d)?, q(p.kappa)?, q(p.rho)?);
    let two = rational(2, 1);
    let m1 = RationalPolynomial::new(vec![a.clone(), b.clone(), c.clone(), d.clone()]);
    let n1 = RationalPolynomial::new(vec![c, b + &two * &d - &kappa + rho, a, -d + kappa]);
    Ok((m1, n1))
}

/// Real roots of an exact polynomial inside `(lo, hi)`, to about 1e-15.
fn real_roots(p: &RationalPolynomial, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let width = rational(1, 1 << 55);
    Ok(isolate_real_roots(p, &Bound::At(rational_from_f64(lo)?), &Bound::At(rational_from_f64(hi)?), &width)?
        .iter()
        .map(|iv| iv.midpoint())
        .collect())
}

/// `(s₁+s₂)(r₁+r₂+r₃) / (r₁r₂r₃s₁s₂ - (r₁+r₂+r₃))`.
pub fn third_root_formula(r: [f64; 3], s: [f64; 2]) -> f64 {
    let sum = r[0] + r[1] + r[2];
    (s[0] + s[1]) * sum / (r[0] * r[1] * r[2] * s[0] * s[1] - sum)
}

/// Polynomial-case parameters with `M₁ = (r-r₁)(r-r₂)(r-r₃)` and `N₁(s₁) = N₁(s₂) = 0`.
pub fn case_iv_params(r: [f64; 3], s: [f64; 2]) -> MelnikovParams {
    let sum = r[0] + r[1] + r[2];
    let e2 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
    let e3 = r[0] * r[1] * r[2];
    let (s1, s2) = (s[0], s[1]);
    let den = s1 * s2 * (s1 + s2);
    let kappa = (e3 * s1 * s2 + s1 * s2 * (s1 + s2) - sum) / den;
    let u = sum * (s1 * s1 + s2 * s2 + s1 * s2 - 1.0) - (e2 + 1.0) * s1 * s2 * (s1 + s2) + e3 * s1 * s2 * (s1 * s2 + 1.0);
    MelnikovParams { a: -e3, b: e2, c: -sum, d: 1.0, kappa, rho: u / den, ..Default::default() }
}

pub fn polynomial_case_analysis(params: &MelnikovParams, m: usize) -> Result<PolynomialCase> {
    if m > MAX_CLOSED_DEGREE {
        return Err(Error::UnsupportedDegree { m, max: MAX_CLOSED_DEGREE });
    }
    if params.alpha != 0.0 || params.beta != 0.0 || params.gamma != 0.0 {
        return Err(Error::Domain("the polynomial case needs alpha = beta = gamma = 0".into()));
    }
    params.check_degree(m, 0.0)?;
    let (pm, pn) = polynomial_pair(params)?;
    let (m1, simple_m) = count_with_multiplicity(&pm)?;
    let (n1, simple_n) = count_with_multiplicity(&pn)?;
    let bound = POLYNOMIAL_BOUNDS[m];
    let third_root = if m == 3 && m1 == 3 && n1 >= 2 && simple_m {
        let r = real_roots(&pm, 0.0, 1.0)?;
        let s = real_roots(&pn, 0.0, 1.0)?;
        (r.len() == 3 && s.len() >= 2).then(|| third_root_formula([r[0], r[1], r[2]], [s[0], s[1]]))
    } else {
        None
    };
    Ok(PolynomialCase {
        configuration: Configuration { m1, n1, certified: simple_m && simple_n },
        bound,
        bound_check: m1 + n1 <= bound,
        third_root,
    })
}

/// `Q_κ(r) = (κ-1) r³ - r₁r₂r₃ r² + (r₁r₂ + r₁r₃ + r₂r₃ + 2 - κ) r - (r₁+r₂+r₃)`.
pub fn q_kappa_family(r: [BigRational; 3]) -> Result<ParametricFamily> {
    let sum = &r[0] + &r[1] + &r[2];
    let e2 = &r[0] * &r[1] + &r[0] * &r[2] + &r[1] * &r[2];
    let e3 = &r[0] * &r[1] * &r[2];
    let two = rational(2, 1);
    ParametricFamily::new(vec![
        RationalPolynomial::constant(-sum),
        RationalPolynomial::new(vec![e2 + two, -BigRational::one()]),
        RationalPolynomial::constant(-e3),
        RationalPolynomial::new(vec![-BigRational::one(), BigRational::one()]),
    ])
}

/// Checks `(i, j)` against the realizable tables; `i ≥ j` is not assumed.
pub fn check_realizable(i: usize, j: usize, m: usize, holomorphic: bool) -> Result<()> {
    let fail = |reason: String| Err(Error::NotSupported { i, j, m, holomorphic, reason });
    let (hi, lo) = (i.max(j), i.min(j));
    match (m, holomorphic) {
        (0, _) if i + j > 1 => fail("m = 0 allows only i + j <= 1".into()),
        (1..=3, false) if hi > m + 3 => fail(format!("each function has at most m + 3 = {} zeros (ECT bound)", m + 3)),
        (1..=3, false) if i + j > 2 * m + 2 => fail(format!(
            "the realizable table for m = {m} stops at i + j <= {} (one zero per free parameter)",
            2 * m + 2
        )),
        (1 | 2, true) if i + j > 2 => fail("holomorphic m <= 2: M1 and N1 are reciprocal quadratics, i + j <= 2".into()),
        (3, true) if hi > 3 || i + j > 4 => fail("holomorphic m = 3 allows i, j <= 3 and i + j <= 4".into()),
        (m, _) if m > 3 => fail("closed forms and realizability tables cover m <= 3 only".into()),
        _ => {
            let _ = lo;
            Ok(())
        }
    }
}

fn canned_layout(i: usize, j: usize, m: usize, holomorphic: bool) -> Vec<ZeroTarget> {
    let n = target_count(m, holomorphic).expect("checked");
    let k = i + j;
    let mut t: Vec<ZeroTarget> = (1..=k)
        .map(|q| {
            let x = q as f64 / (k + 1) as f64;
            if q <= i {
                ZeroTarget::f(x)
            } else {
                ZeroTarget::g(x)
            }
        })
        .collect();
    let pad = n - k;
    let cap = per_function_cap(m, holomorphic);
    let (mut nf, mut ng) = (i, j);
    for q in 1..=pad {
        let x = -(q as f64) / (pad + 1) as f64;
        let use_f = if q % 2 == 1 { nf < cap } else { ng >= cap };
        if use_f {
            nf += 1;
            t.push(ZeroTarget::f(x));
        } else {
            ng += 1;
            t.push(ZeroTarget::g(x));
        }
    }
    t
}

fn random_layout<R: Rng>(i: usize, j: usize, m: usize, holomorphic: bool, rng: &mut R) -> Vec<ZeroTarget> {
    let n = target_count(m, holomorphic).expect("checked");
    let cap = per_function_cap(m, holomorphic);
    let mut pos: Vec<f64> = (0..i + j).map(|_| rng.gen_range(0.03..0.97)).collect();
    pos.sort_by(f64::total_cmp);
    let mut which: Vec<Target> = (0..i + j).map(|q| if q < i { Target::F } else { Target::G }).collect();
    for q in (1..which.len()).rev() {
        which.swap(q, rng.gen_range(0..=q));
    }
    let mut t: Vec<ZeroTarget> = pos.iter().zip(&which).map(|(&location, &w)| ZeroTarget { location, which: w }).collect();
    let (mut nf, mut ng) = (i, j);
    for _ in 0..n - i - j {
        let x = -rng.gen_range(0.03..0.97);
        let use_f = match (nf < cap, ng < cap) {
            (true, true) => rng.gen_bool(0.5),
            (f, _) => f,
        };
        if use_f {
            nf += 1;
            t.push(ZeroTarget::f(x));
        } else {
            ng += 1;
            t.push(ZeroTarget::g(x));
        }
    }
    t
}

/// Quick zero counts from the dense scan, used to skip hopeless layouts.
fn scan_counts(params: &MelnikovParams, m: usize, holomorphic: bool) -> Option<(usize, usize)> {
    let (f, g) = function_pair(params, m, holomorphic).ok()?;
    let (lo, hi) = UNIT_INTERVAL;
    Some((scan_sign_changes(&f, lo, hi, 4000).len(), scan_sign_changes(&g, lo, hi, 4000).len()))
}

/// A perturbation realizing the configuration `[[i, j]]` with certified simple zeros.
pub fn realize<R: Rng>(i: usize, j: usize, m: usize, holomorphic: bool, rng: &mut R) -> Result<PerturbationSpec> {
    check_realizable(i, j, m, holomorphic)?;
    if i == 0 && j == 0 {
        return Ok(PerturbationSpec::zero(m, holomorphic));
    }
    if i < j {
        return Ok(reflect(&realize(j, i, m, holomorphic, rng)?));
    }
    let mut last = (0, 0);
    for attempt in 0..REALIZE_ATTEMPTS {
        let targets = if attempt == 0 {
            canned_layout(i, j, m, holomorphic)
        } else {
            random_layout(i, j, m, holomorphic, rng)
        };
        let Ok(params) = design(&targets, m, holomorphic) else { continue };
        match scan_counts(&params, m, holomorphic) {
            Some(c) if c == (i, j) => {}
            Some(c) => {
                last = c;
                continue;
            }
            None => continue,
        }
        let Ok(spec) = params_to_perturbation(&params, m, holomorphic) else { continue };
        let Ok(conf) = verify_spec(&spec) else { continue };
        last = (conf.m1, conf.n1);
        if conf.certified && (conf.m1, conf.n1) == (i, j) {
            return Ok(spec);
        }
    }
    Err(Error::RealizeFailed { i, j, attempts: REALIZE_ATTEMPTS, got_i: last.0, got_j: last.1 })
}

pub fn realize_seeded(i: usize, j: usize, m: usize, holomorphic: bool, seed: u64) -> Result<PerturbationSpec> {
    realize(i, j, m, holomorphic, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// All `(i, j)` with `i ≥ j` in the realizable table of `(m, holomorphic)`.
pub fn realizable_table(m: usize, holomorphic: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=8 {
        for j in 0..=i {
            if check_realizable(i, j, m, holomorphic).is_ok() {
                out.push((i, j));
            }
        }
    }
    out
}
