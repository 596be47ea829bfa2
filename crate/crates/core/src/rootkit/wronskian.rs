//! Wronskians of the two function families whose spans contain the averaged functions:
//!
//! ```text
//! ℱ    = [r, r², r³, r⁴, (r²-1)² atanh r, (r⁴-1) atanh r, r² atanh r]
//! 𝒢(m) = [1, r, …, r^{2(m-2)}, r (r²-1)^{m-3} atanh r],  m ≥ 3
//! ```

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::closed::atanh;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    F,
    G(usize),
}

impl Basis {
    pub fn len(&self) -> usize {
        match self {
            Basis::F => 7,
            Basis::G(m) => 2 * m - 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Basis::G(m) if *m < 3 => Err(Error::Domain(format!("the G basis needs m >= 3, got {m}"))),
            _ => Ok(()),
        }
    }

    /// Each element as `poly(r)` or `poly(r)·atanh(r)`.
    pub fn elements(&self) -> Vec<BasisElement> {
        match self {
            Basis::F => vec![
                BasisElement::poly(vec![0.0, 1.0]),
                BasisElement::poly(vec![0.0, 0.0, 1.0]),
                BasisElement::poly(vec![0.0, 0.0, 0.0, 1.0]),
                BasisElement::poly(vec![0.0, 0.0, 0.0, 0.0, 1.0]),
                BasisElement::with_atanh(vec![1.0, 0.0, -2.0, 0.0, 1.0]),
                BasisElement::with_atanh(vec![-1.0, 0.0, 0.0, 0.0, 1.0]),
                BasisElement::with_atanh(vec![0.0, 0.0, 1.0]),
            ],
            Basis::G(m) => {
                let mut out: Vec<BasisElement> = (0..=2 * (m - 2))
                    .map(|k| {
                        let mut c = vec![0.0; k + 1];
                        c[k] = 1.0;
                        BasisElement::poly(c)
                    })
                    .collect();
                // r (r² - 1)^{m-3}
                let mut c = vec![0.0, 1.0];
                for _ in 3..*m {
                    let mut next = vec![0.0; c.len() + 2];
                    for (i, v) in c.iter().enumerate() {
                        next[i] -= v;
                        next[i + 2] += v;
                    }
                    c = next;
                }
                out.push(BasisElement::with_atanh(c));
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisElement {
    pub poly: Vec<f64>,
    pub atanh: bool,
}

impl BasisElement {
    fn poly(poly: Vec<f64>) -> Self {
        BasisElement { poly, atanh: false }
    }

    fn with_atanh(poly: Vec<f64>) -> Self {
        BasisElement { poly, atanh: true }
    }

    /// `k`-th derivative at `r` by the Leibniz rule and the closed form of `atanh⁽ⁱ⁾`.
    pub fn derivative(&self, k: usize, r: f64) -> f64 {
        if !self.atanh {
            return poly_derivative(&self.poly, k, r);
        }
        let mut sum = 0.0;
        let mut binom = 1.0;
        for i in 0..=k {
            sum += binom * poly_derivative(&self.poly, k - i, r) * atanh_derivative(i, r);
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
        sum
    }
}

fn poly_derivative(c: &[f64], k: usize, r: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(k)
        .map(|(i, &v)| {
            let falling: f64 = ((i - k + 1)..=i).map(|j| j as f64).product();
            v * falling * r.powi((i - k) as i32)
        })
        .sum()
}

/// `atanh⁽ⁱ⁾(r) = (i-1)!/2 · [(1-r)^{-i} + (-1)^{i-1} (1+r)^{-i}]` for `i ≥ 1`.
fn atanh_derivative(i: usize, r: f64) -> f64 {
    if i == 0 {
        return atanh(r);
    }
    let fact: f64 = (1..i).map(|j| j as f64).product();
    let sign = if (i - 1) % 2 == 0 { 1.0 } else { -1.0 };
    0.5 * fact * ((1.0 - r).powi(-(i as i32)) + sign * (1.0 + r).powi(-(i as i32)))
}

/// Wronskian of the first `k + 1` elements, as a determinant of exact derivatives.
pub fn numeric_wronskian(basis: Basis, k: usize, r: f64) -> f64 {
    let el = basis.elements();
    let n = k + 1;
    let m = DMatrix::from_fn(n, n, |i, j| el[j].derivative(i, r));
    m.determinant()
}

/// Below this radius the brackets `P + V·atanh` are summed from their exact power
/// series: the closed forms cancel to `O(r⁵)`, `O(r⁷)`, `O(r⁹)` and lose every digit
/// near the origin when evaluated as printed.
const SERIES_BELOW: f64 = 0.5;
const SERIES_TERMS: usize = 200;

/// Exact Taylor coefficients of `p(r) + v(r)·atanh(r)`, rounded once.
fn bracket_series(p: &[i64], v: &[i64]) -> Vec<BigRational> {
    let mut c = vec![BigRational::zero(); SERIES_TERMS];
    for (i, &x) in p.iter().enumerate() {
        c[i] += BigRational::from_integer(x.into());
    }
    for (i, &x) in v.iter().enumerate() {
        let mut k = 0;
        while i + 2 * k + 1 < SERIES_TERMS {
            c[i + 2 * k + 1] += BigRational::new(x.into(), (2 * k as i64 + 1).into());
            k += 1;
        }
    }
    c
}

fn to_f64(c: &[BigRational]) -> Vec<f64> {
    c.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

fn horner(c: &[f64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, x| acc * r + x)
}

const W4_P: [i64; 4] = [0, -3, 0, 5];
const W4_V: [i64; 5] = [3, 0, -6, 0, 3];
const W5_P: [i64; 6] = [0, -15, 0, 22, 0, -3];
const W5_V: [i64; 7] = [15, 0, -27, 0, 9, 0, 3];
const W6_P: [i64; 8] = [0, -105, 0, 145, 0, -15, 0, -9];
const W6_V: [i64; 9] = [105, 0, -180, 0, 54, 0, 12, 0, 9];

struct Series {
    w4: Vec<f64>,
    w5: Vec<f64>,
    w6: Vec<f64>,
    /// `B₄'(r)(r² - 1) - 4r B₄(r)`, with `B₄` the `W₄` bracket.
    w4_derivative: Vec<f64>,
    w4_derivative_exact: Vec<BigRational>,
}

fn series() -> &'static Series {
    static CELL: OnceLock<Series> = OnceLock::new();
    CELL.get_or_init(|| {
        let b4 = bracket_series(&W4_P, &W4_V);
        let mut t = vec![BigRational::zero(); SERIES_TERMS];
        for j in 1..SERIES_TERMS {
            let d = &b4[j] * BigRational::from_integer((j as i64).into());
            // B'(r) = Σ j b_j r^{j-1}; times (r² - 1)
            if j + 1 < SERIES_TERMS {
                t[j + 1] += &d;
            }
            t[j - 1] -= &d;
        }
        for j in 0..SERIES_TERMS - 1 {
            t[j + 1] -= &b4[j] * BigRational::from_integer(4.into());
        }
        Series {
            w4: to_f64(&b4),
            w5: to_f64(&bracket_series(&W5_P, &W5_V)),
            w6: to_f64(&bracket_series(&W6_P, &W6_V)),
            w4_derivative: to_f64(&t),
            w4_derivative_exact: t,
        }
    })
}

fn bracket(p: &[i64], v: &[i64], series: &[f64], r: f64) -> f64 {
    if r <= SERIES_BELOW {
        return horner(series, r);
    }
    let pf: Vec<f64> = p.iter().map(|&x| x as f64).collect();
    let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
    horner(&pf, r) + horner(&vf, r) * atanh(r)
}

/// The printed closed forms `W₀ … W₆` for `ℱ`.
pub fn f_closed_forms(r: f64) -> [f64; 7] {
    let s = series();
    let q = r * r - 1.0;
    let w4 = 96.0 * bracket(&W4_P, &W4_V, &s.w4, r) / (q * q);
    let w5 = 3072.0 * bracket(&W5_P, &W5_V, &s.w5, r) / q.powi(6);
    let w6 = 294912.0 * r * bracket(&W6_P, &W6_V, &s.w6, r) / q.powi(12);
    [r, r * r, 2.0 * r.powi(3), 12.0 * r.powi(4), w4, w5, w6]
}

/// `W₄'(r)·(1 - r²)³`, differentiated from the printed `W₄`.
pub fn f_w4_derivative_scaled(r: f64) -> f64 {
    let s = series();
    let q = r * r - 1.0;
    let t = if r <= SERIES_BELOW {
        horner(&s.w4_derivative, r)
    } else {
        let a = atanh(r);
        let b = r * (5.0 * r * r - 3.0) + 3.0 * q * q * a;
        let db = 15.0 * r * r - 3.0 + 12.0 * r * q * a - 3.0 * q;
        db * q - 4.0 * r * b
    };
    // W₄' = 96 (B'q - 4rB)/q³ and (1 - r²)³ = -q³
    -96.0 * t
}

/// Taylor coefficients of `W₄'(r)(1 - r²)³ / 96`, exact, up to the series length.
pub fn f_w4_derivative_series() -> Vec<BigRational> {
    series().w4_derivative_exact.iter().map(|x| -x.clone()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct WronskianReport {
    /// Closed forms: `W₀…W₆` for `ℱ`; the factorial products `∏ₖ₌₀ʲ k!` of the polynomial
    /// prefix for `𝒢(m)`.
    pub closed: Vec<f64>,
    /// Determinants of exact derivative matrices, one per prefix (for `𝒢`, including
    /// the final element).
    pub numeric: Vec<f64>,
}

pub fn wronskians(basis: Basis, r: f64) -> Result<WronskianReport> {
    basis.validate()?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r = {r} is outside (0,1)")));
    }
    let numeric = (0..basis.len()).map(|k| numeric_wronskian(basis, k, r)).collect();
    let closed = match basis {
        Basis::F => f_closed_forms(r).to_vec(),
        Basis::G(m) => {
            let mut out = Vec::new();
            let mut acc = 1.0;
            for j in 0..=2 * (m - 2) {
                acc *= (1..=j).map(|x| x as f64).product::<f64>();
                out.push(acc);
            }
            out
        }
    };
    Ok(WronskianReport { closed, numeric })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_values_at_half() {
        let w = wronskians(Basis::F, 0.5).unwrap();
        assert_eq!(w.closed[2], 0.25);
        assert_eq!(w.closed[3], 0.75);
    }

    #[test]
    fn closed_forms_match_determinants() {
        for &r in &[0.2, 0.35, 0.6, 0.85] {
            let w = wronskians(Basis::F, r).unwrap();
            for k in 0..7 {
                let rel = (w.closed[k] - w.numeric[k]).abs() / w.closed[k].abs();
                assert!(rel < 1e-6, "W{k} at {r}: {} vs {}", w.closed[k], w.numeric[k]);
            }
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        let below = f_closed_forms(SERIES_BELOW);
        let above = f_closed_forms(SERIES_BELOW + 1e-12);
        for k in 4..7 {
            assert!((below[k] - above[k]).abs() < 1e-9 * below[k].abs());
        }
        let d0 = f_w4_derivative_scaled(SERIES_BELOW);
        let d1 = f_w4_derivative_scaled(SERIES_BELOW + 1e-12);
        assert!((d0 - d1).abs() < 1e-9 * d0.abs());
    }

    #[test]
    fn w4_derivative_series_is_monomial() {
        let c = f_w4_derivative_series();
        for (j, x) in c.iter().enumerate().take(SERIES_TERMS - 2) {
            let expected = if j == 4 { BigRational::from_integer(8.into()) } else { BigRational::zero() };
            assert_eq!(*x, expected, "coefficient {j}");
        }
    }

    #[test]
    fn factorial_products() {
        let w = wronskians(Basis::G(4), 0.3).unwrap();
        assert_eq!(w.closed, vec![1.0, 1.0, 2.0, 12.0, 288.0]);
        for (c, n) in w.closed.iter().zip(&w.numeric) {
            assert!((c - n).abs() < 1e-9 * c);
        }
        assert!(w.numeric[5] > 0.0);
        assert!(matches!(wronskians(Basis::G(2), 0.3), Err(Error::Domain(_))));
        assert!(matches!(wronskians(Basis::F, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn atanh_derivatives_by_difference() {
        for i in 0..5 {
            let h = 1e-5;
            let r = 0.4;
            let fd = (atanh_derivative(i, r + h) - atanh_derivative(i, r - h)) / (2.0 * h);
            let exact = atanh_derivative(i + 1, r);
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "order {i}");
        }
    }
}
