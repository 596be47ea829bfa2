//! Certified zero counting for elements of the `ℱ` and `𝒢(m)` spans on subintervals of
//! `(0, 1)`.
//!
//! Every element has the form `f = P + Q·atanh` with polynomial `P`, `Q`. Away from the
//! roots of `Q`, `h = f/Q` has
//!
//! ```text
//! h' = N / (Q² (1 - r²)),   N = (P'Q - PQ')(1 - r²) + Q²,
//! ```
//!
//! so between consecutive real roots of `Q·N` the function `h` is strictly monotone and
//! `f` has at most one zero, which is simple and exists exactly when `f` changes sign.
//! The roots of `Q` and `N` are isolated exactly (rational arithmetic on the exact
//! binary values of the coefficients); only the signs of `f` at those breakpoints are
//! floating point, and they are accepted only when well above the rounding level.
//! When `Q ≡ 0` the same argument runs with `N = P'`.

use serde::Serialize;

use super::poly::{isolate_real_roots, rational, rational_from_f64, Bound, RationalPolynomial};
use super::wronskian::Basis;
use crate::closed::{self, atanh, eval_reduced, m1_coefficients, n1_coefficients, reduced_f_basis, HolomorphicParams, Which, F_LEN};
use crate::error::{Error, Result};
use crate::perturbation::MelnikovParams;

/// Points in the dense scan.
pub const SCAN_POINTS: usize = 10_000;
/// Default bisection tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Interval used when counting zeros "in (0, 1)".
pub const UNIT_INTERVAL: (f64, f64) = (1e-9, 1.0 - 1e-9);
/// A breakpoint sign is trusted when `|f|` exceeds this multiple of `Σ|cᵢ φᵢ|`.
const NOISE: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanFunction {
    pub basis: Basis,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero {
    pub location: f64,
    pub half_width: f64,
    pub simple: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroReport {
    pub zeros: Vec<Zero>,
    pub count_certified: bool,
    /// ECT bound: index of the last nonzero coefficient.
    pub ceiling: usize,
}

impl ZeroReport {
    pub fn count(&self) -> usize {
        self.zeros.len()
    }

    /// The count, if it is certified and every zero is simple.
    pub fn certified_simple_count(&self) -> Option<usize> {
        (self.count_certified && self.zeros.iter().all(|z| z.simple)).then_some(self.zeros.len())
    }
}

impl SpanFunction {
    pub fn new(basis: Basis, coefficients: Vec<f64>) -> Result<Self> {
        basis.validate()?;
        if coefficients.len() != basis.len() {
            return Err(Error::Domain(format!("basis {basis:?} needs {} coefficients, got {}", basis.len(), coefficients.len())));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("coefficients must be finite".into()));
        }
        Ok(SpanFunction { basis, coefficients })
    }

    /// `r·M₁` in the `ℱ` basis.
    pub fn m1(params: &MelnikovParams) -> Self {
        SpanFunction { basis: Basis::F, coefficients: m1_coefficients(params).to_vec() }
    }

    /// `r·N₁` in the `ℱ` basis.
    pub fn n1(params: &MelnikovParams) -> Self {
        SpanFunction { basis: Basis::F, coefficients: n1_coefficients(params).to_vec() }
    }

    /// `M₁` or `N₁` of a holomorphic perturbation with `m ≤ 3`, in `𝒢(3) = [1, r, r², r atanh r]`.
    pub fn holomorphic(params: &HolomorphicParams, which: Which) -> Self {
        let h = params;
        let coefficients = match which {
            Which::M1 => vec![h.a, h.b, h.c, h.alpha],
            Which::N1 => vec![h.c, h.b - h.kappa, h.a, h.alpha],
        };
        SpanFunction { basis: Basis::G(3), coefficients }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    pub fn ceiling(&self) -> usize {
        self.coefficients.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// A positive multiple of `f(r)` (for `ℱ`, `f(r)/r`) and the matching `Σ|cᵢ φᵢ|`.
    pub fn eval_scaled(&self, r: f64) -> (f64, f64) {
        match self.basis {
            Basis::F => {
                let c: [f64; F_LEN] = self.coefficients.as_slice().try_into().expect("length checked");
                let (b, _) = reduced_f_basis(r);
                let scale = c.iter().zip(b.iter()).map(|(x, y)| (x * y).abs()).sum();
                (eval_reduced(&c, r).0, scale)
            }
            Basis::G(_) => {
                let el = self.basis.elements();
                let a = atanh(r);
                let mut v = 0.0;
                let mut s = 0.0;
                for (c, e) in self.coefficients.iter().zip(el.iter()) {
                    let p: f64 = e.poly.iter().rev().fold(0.0, |acc, x| acc * r + x);
                    let t = c * p * if e.atanh { a } else { 1.0 };
                    v += t;
                    s += t.abs();
                }
                (v, s)
            }
        }
    }

    /// `f(r)` itself.
    pub fn eval(&self, r: f64) -> f64 {
        let (v, _) = self.eval_scaled(r);
        match self.basis {
            Basis::F => v * r,
            Basis::G(_) => v,
        }
    }

    /// Exact `(P, Q)` with `f = P + Q·atanh`.
    pub fn split(&self) -> Result<(RationalPolynomial, RationalPolynomial)> {
        let mut p = RationalPolynomial::zero();
        let mut q = RationalPolynomial::zero();
        for (c, e) in self.coefficients.iter().zip(self.basis.elements()) {
            if *c == 0.0 {
                continue;
            }
            let term = RationalPolynomial::from_f64(&e.poly)?.scale(&rational_from_f64(*c)?);
            if e.atanh {
                q = &q + &term;
            } else {
                p = &p + &term;
            }
        }
        Ok((p, q))
    }
}

fn sign_robust(f: &SpanFunction, r: f64) -> i8 {
    let (v, s) = f.eval_scaled(r);
    if v.abs() <= NOISE * s || v == 0.0 {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

fn sign_plain(f: &SpanFunction, r: f64) -> i8 {
    let v = f.eval_scaled(r).0;
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection on `[a, b]` where `f(a)`, `f(b)` have opposite signs.
fn bisect(f: &SpanFunction, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let sa = sign_plain(f, a);
    for _ in 0..200 {
        if b - a <= 2.0 * tol {
            break;
        }
        let c = 0.5 * (a + b);
        if c <= a || c >= b {
            break;
        }
        let sc = sign_plain(f, c);
        if sc == 0 {
            return (c, 0.0);
        }
        if sc == sa {
            a = c;
        } else {
            b = c;
        }
    }
    (0.5 * (a + b), 0.5 * (b - a))
}

/// Number of sign changes over the dense scan.
pub fn scan_sign_changes(f: &SpanFunction, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, i8)> = None;
    for i in 0..points {
        let r = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let s = sign_plain(f, r);
        if s == 0 {
            continue;
        }
        if let Some((pr, ps)) = prev {
            if ps != s {
                out.push((pr, r));
            }
        }
        prev = Some((r, s));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Node {
    End,
    QRoot,
    Critical,
}

/// Roots of `p` in `(lo, hi)` as `f64` midpoints; endpoint roots nudge the endpoint inward.
fn breakpoints(p: &RationalPolynomial, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let width = rational(1, 1 << 52);
    let mut lo_q = rational_from_f64(lo)?;
    let mut hi_q = rational_from_f64(hi)?;
    let nudge = rational(1, 1 << 40);
    if p.eval(&lo_q) == num_rational::BigRational::from_integer(0.into()) {
        lo_q += &nudge;
    }
    if p.eval(&hi_q) == num_rational::BigRational::from_integer(0.into()) {
        hi_q -= &nudge;
    }
    Ok(isolate_real_roots(p, &Bound::At(lo_q), &Bound::At(hi_q), &width)?
        .iter()
        .map(|iv| iv.midpoint())
        .collect())
}

/// Isolates and counts the zeros of `f` in `(lo, hi)`.
pub fn isolate_zeros(f: &SpanFunction, interval: (f64, f64), tol: f64) -> Result<ZeroReport> {
    let (lo, hi) = interval;
    if !(lo >= 1e-9 && hi <= 1.0 - 1e-9 && lo < hi) {
        return Err(Error::Domain(format!("interval ({lo}, {hi}) must lie in [1e-9, 1-1e-9]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    f.basis.validate()?;
    if f.is_zero() {
        return Ok(ZeroReport { zeros: Vec::new(), count_certified: true, ceiling: 0 });
    }
    let ceiling = f.ceiling();

    let (p, q) = f.split()?;
    let critical = if q.is_zero() {
        p.derivative()
    } else {
        let one_minus_r2 = RationalPolynomial::from_i64(&[1, 0, -1]);
        let wr = &(&p.derivative() * &q) - &(&p * &q.derivative());
        &(&wr * &one_minus_r2) + &(&q * &q)
    };
    let mut nodes: Vec<(f64, Node)> = vec![(lo, Node::End), (hi, Node::End)];
    nodes.extend(breakpoints(&q, lo, hi)?.into_iter().map(|x| (x, Node::QRoot)));
    nodes.extend(breakpoints(&critical, lo, hi)?.into_iter().map(|x| (x, Node::Critical)));
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15);

    let mut certified = true;
    let mut zeros: Vec<Zero> = Vec::new();
    let mut last: Option<(f64, i8)> = None;
    for &(x, kind) in &nodes {
        let s = sign_robust(f, x);
        if s == 0 {
            // f is numerically zero at a breakpoint: either a tangency (extremum of f/Q)
            // or a zero too close to call
            certified = false;
            zeros.push(Zero { location: x, half_width: 0.0, simple: false });
            let _ = kind;
            last = None;
            continue;
        }
        if let Some((px, ps)) = last {
            if ps != s {
                let (loc, hw) = bisect(f, px, x, tol);
                zeros.push(Zero { location: loc, half_width: hw, simple: true });
            }
        }
        last = Some((x, s));
    }

    // the dense scan can only see a subset of the certified zeros
    let scan = scan_sign_changes(f, lo, hi, SCAN_POINTS);
    let n_simple = zeros.iter().filter(|z| z.simple).count();
    if scan.len() > n_simple {
        certified = false;
    }

    zeros.sort_by(|a, b| a.location.total_cmp(&b.location));
    let mut merged: Vec<Zero> = Vec::with_capacity(zeros.len());
    for z in zeros {
        if let Some(prev) = merged.last_mut() {
            if z.location - prev.location < 10.0 * tol {
                prev.simple = false;
                prev.half_width = prev.half_width.max(z.location - prev.location + z.half_width);
                certified = false;
                continue;
            }
        }
        merged.push(z);
    }
    if merged.len() > ceiling {
        certified = false;
    }
    Ok(ZeroReport { zeros: merged, count_certified: certified, ceiling })
}

/// Zeros of `M₁` or `N₁` in `(0, 1)` for closed-form parameters.
pub fn zeros_of(params: &MelnikovParams, which: Which) -> Result<ZeroReport> {
    let f = match which {
        Which::M1 => SpanFunction::m1(params),
        Which::N1 => SpanFunction::n1(params),
    };
    isolate_zeros(&f, UNIT_INTERVAL, DEFAULT_TOL)
}

/// Convenience re-export for callers that only have the closed-form module in scope.
pub fn eval_m1_scaled(params: &MelnikovParams, r: f64) -> Result<f64> {
    closed::eval_m1(params, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, c: f64, d: f64, alpha: f64, beta: f64, gamma: f64) -> MelnikovParams {
        MelnikovParams { a, b, c, d, alpha, beta, gamma, ..Default::default() }
    }

    #[test]
    fn m0_single_zero() {
        let p = params(1.0, -0.5, -1.0, 0.0, 0.0, 0.0, 0.0);
        let rep = zeros_of(&p, Which::M1).unwrap();
        assert_eq!(rep.certified_simple_count(), Some(1));
        let root = (-0.5 + 17f64.sqrt() / 2.0) / 2.0;
        assert!((rep.zeros[0].location - root).abs() < 1e-11);
        assert_eq!(rep.ceiling, 2);
    }

    #[test]
    fn linear_in_f_basis() {
        let f = SpanFunction::new(Basis::F, vec![-0.5, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let rep = isolate_zeros(&f, UNIT_INTERVAL, 1e-12).unwrap();
        assert_eq!(rep.certified_simple_count(), Some(1));
        assert!((rep.zeros[0].location - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn zero_function() {
        let rep = isolate_zeros(&SpanFunction::m1(&MelnikovParams::default()), UNIT_INTERVAL, 1e-12).unwrap();
        assert_eq!(rep.certified_simple_count(), Some(0));
    }

    #[test]
    fn double_zero_is_not_simple() {
        // r (r - 1/2)² in ℱ
        let f = SpanFunction::new(Basis::F, vec![0.25, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let rep = isolate_zeros(&f, UNIT_INTERVAL, 1e-12).unwrap();
        assert!(!rep.count_certified);
        assert!(rep.zeros.iter().any(|z| !z.simple && (z.location - 0.5).abs() < 1e-6));
    }

    #[test]
    fn transcendental_zeros_match_scan() {
        // r - 0.8·r² atanh r has a single zero where 0.8 r atanh r = 1
        let f = SpanFunction::new(Basis::F, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -0.8]).unwrap();
        let rep = isolate_zeros(&f, UNIT_INTERVAL, 1e-12).unwrap();
        assert_eq!(rep.certified_simple_count(), Some(1));
        let r = rep.zeros[0].location;
        assert!((0.8 * r * r.atanh() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn holomorphic_quadratic() {
        let h = HolomorphicParams { a: 1.0, b: -2.6, c: 1.0, ..Default::default() };
        let m = isolate_zeros(&SpanFunction::holomorphic(&h, Which::M1), UNIT_INTERVAL, 1e-12).unwrap();
        let n = isolate_zeros(&SpanFunction::holomorphic(&h, Which::N1), UNIT_INTERVAL, 1e-12).unwrap();
        assert_eq!(m.certified_simple_count(), Some(1));
        assert_eq!(n.certified_simple_count(), Some(1));
        assert_eq!(m.ceiling, 2);
    }

    #[test]
    fn domain_checks() {
        let f = SpanFunction::m1(&params(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert!(isolate_zeros(&f, (0.0, 0.5), 1e-12).is_err());
        assert!(isolate_zeros(&f, (0.1, 1.0), 1e-12).is_err());
        assert!(SpanFunction::new(Basis::F, vec![1.0]).is_err());
    }
}
