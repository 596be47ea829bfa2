//! Closed-form averaged functions for the model center `f(z) = i(z²-1)/2`, degree `m <= 3`.
//!
//! Every function here is a combination over the ordered basis
//!
//! ```text
//! F = [r, r², r³, r⁴, (r²-1)² atanh r, (r⁴-1) atanh r, r² atanh r]
//! ```
//!
//! divided by `r`. The division is never performed at runtime: polynomial terms are
//! shifted down one degree and `atanh(r)` is replaced by `atanh(r)/r`, which has a
//! convergent even series at the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perturbation::{MelnikovParams, Side};

pub const F_LEN: usize = 7;

/// Largest radius accepted by the closed-form evaluators.
pub const R_CAP: f64 = 1.0 - 1e-12;

const SERIES_SWITCH: f64 = 0.05;

/// `atanh(r) = ½ ln((1+r)/(1-r))`, written with `ln_1p` so small arguments keep full precision.
pub fn atanh(r: f64) -> f64 {
    0.5 * (2.0 * r / (1.0 - r)).ln_1p()
}

/// `atanh(r)/r`, continuous through `r = 0`.
pub fn atanhc(r: f64) -> f64 {
    if r.abs() < SERIES_SWITCH {
        let r2 = r * r;
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..14 {
            sum += term / (2 * n + 1) as f64;
            term *= r2;
        }
        sum
    } else {
        atanh(r) / r
    }
}

/// Derivative of [`atanhc`].
pub fn atanhc_prime(r: f64) -> f64 {
    if r.abs() < SERIES_SWITCH {
        let r2 = r * r;
        // Σ 2n r^(2n-1)/(2n+1)
        let mut pow = r;
        let mut sum = 0.0;
        for n in 1..14 {
            sum += 2.0 * n as f64 * pow / (2 * n + 1) as f64;
            pow *= r2;
        }
        sum
    } else {
        (1.0 / (1.0 - r * r) - atanhc(r)) / r
    }
}

/// Basis `F` divided by `r`, with first derivatives. Valid for `|r| < 1`.
pub fn reduced_f_basis(r: f64) -> ([f64; F_LEN], [f64; F_LEN]) {
    let r2 = r * r;
    let s = atanhc(r);
    let ds = atanhc_prime(r);
    let sq = (r2 - 1.0) * (r2 - 1.0);
    let q4 = r2 * r2 - 1.0;
    let val = [1.0, r, r2, r2 * r, sq * s, q4 * s, r2 * s];
    let der = [
        0.0,
        1.0,
        2.0 * r,
        3.0 * r2,
        4.0 * r * (r2 - 1.0) * s + sq * ds,
        4.0 * r2 * r * s + q4 * ds,
        2.0 * r * s + r2 * ds,
    ];
    (val, der)
}

/// Basis `F` itself (numerators, not divided by `r`). Valid for `|r| < 1`.
pub fn f_basis(r: f64) -> [f64; F_LEN] {
    let (v, _) = reduced_f_basis(r);
    let mut out = [0.0; F_LEN];
    for i in 0..F_LEN {
        out[i] = r * v[i];
    }
    out
}

/// One appendix building block `I_{k,l}` as coordinates in `F` (for `r·I`).
///
/// `im` multiplies `Im(a_{k,l})`, `re` multiplies `s·Re(a_{k,l})` where `s = +1` on the
/// upper side and `-1` on the lower side.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockForm {
    pub k: usize,
    pub l: usize,
    pub im: [f64; F_LEN],
    pub re: [f64; F_LEN],
}

const PI: f64 = std::f64::consts::PI;

pub(crate) const BLOCKS: [BlockForm; 10] = [
    BlockForm { k: 0, l: 0, im: [1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0], re: [0.0, -PI, 0.0, 0.0, 0.0, 0.0, 0.0] },
    BlockForm { k: 0, l: 1, im: [-1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0], re: [0.0; F_LEN] },
    BlockForm { k: 1, l: 1, im: [1.0, 0.0, 1.0, 0.0, -2.0, 0.0, 0.0], re: [0.0, PI, 0.0, -PI, 0.0, 0.0, 0.0] },
    BlockForm { k: 0, l: 2, im: [1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0], re: [0.0, PI, 0.0, 0.0, 0.0, 0.0, 0.0] },
    BlockForm { k: 1, l: 2, im: [-1.0, 0.0, 1.0, 0.0, 0.0, -2.0, 0.0], re: [0.0, 0.0, 0.0, -PI, 0.0, 0.0, 0.0] },
    BlockForm { k: 2, l: 2, im: [5.0, 0.0, -5.0, 0.0, 0.0, 4.0, 0.0], re: [0.0, -PI, 0.0, 2.0 * PI, 0.0, 0.0, 0.0] },
    BlockForm { k: 0, l: 3, im: [-1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 8.0], re: [0.0, -2.0 * PI, 0.0, 0.0, 0.0, 0.0, 0.0] },
    BlockForm { k: 1, l: 3, im: [1.0, 0.0, 1.0, 0.0, -2.0, 0.0, -8.0], re: [0.0, -PI, 0.0, -PI, 0.0, 0.0, 0.0] },
    BlockForm { k: 2, l: 3, im: [-5.0, 0.0, -5.0, 0.0, 4.0, 0.0, 8.0], re: [0.0, 0.0, 0.0, 2.0 * PI, 0.0, 0.0, 0.0] },
    BlockForm { k: 3, l: 3, im: [5.0, 0.0, 5.0, 0.0, -6.0, 0.0, -8.0], re: [0.0, PI, 0.0, -3.0 * PI, 0.0, 0.0, 0.0] },
];

pub(crate) fn block(k: usize, l: usize) -> Option<&'static BlockForm> {
    BLOCKS.iter().find(|b| b.k == k && b.l == l)
}

fn check_radius(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r = {r} is outside (0,1)")));
    }
    Ok(r.min(R_CAP))
}

fn dot(a: &[f64; F_LEN], b: &[f64; F_LEN]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The contribution `I^±_{k,l}(r)` of one perturbation coefficient to `M₁^±(r)`.
pub fn eval_i_kl(coefficient: Complex64, k: usize, l: usize, side: Side, r: f64) -> Result<f64> {
    let r = check_radius(r)?;
    let form = block(k, l)
        .filter(|_| k <= l)
        .ok_or_else(|| Error::Unsupported(format!("block I_{{{k},{l}}} has no closed form (need 0<=k<=l<=3)")))?;
    let (basis, _) = reduced_f_basis(r);
    Ok(coefficient.im * dot(&form.im, &basis) + side.sign() * coefficient.re * dot(&form.re, &basis))
}

/// Coordinates of `r·M₁` in `F`.
pub fn m1_coefficients(p: &MelnikovParams) -> [f64; F_LEN] {
    [p.a, p.b, p.c, p.d, p.alpha, p.beta, p.gamma]
}

/// Coordinates of `r·N₁` in `F`, obtained by substituting into the `M₁` pattern.
pub fn n1_coefficients(p: &MelnikovParams) -> [f64; F_LEN] {
    let substituted = MelnikovParams {
        a: p.c,
        b: p.b + 2.0 * p.d - p.kappa + p.rho,
        c: p.a,
        d: -p.d + p.kappa,
        alpha: p.alpha,
        beta: -p.beta,
        gamma: p.gamma,
        kappa: 0.0,
        rho: 0.0,
    };
    m1_coefficients(&substituted)
}

/// Evaluates `(Σ cᵢ Fᵢ(r))/r` and its derivative for `|r| < 1`.
pub fn eval_reduced(coeffs: &[f64; F_LEN], r: f64) -> (f64, f64) {
    let (v, d) = reduced_f_basis(r);
    (dot(coeffs, &v), dot(coeffs, &d))
}

pub fn eval_m1(params: &MelnikovParams, r: f64) -> Result<f64> {
    let r = check_radius(r)?;
    Ok(eval_reduced(&m1_coefficients(params), r).0)
}

pub fn eval_n1(params: &MelnikovParams, r: f64) -> Result<f64> {
    let r = check_radius(r)?;
    Ok(eval_reduced(&n1_coefficients(params), r).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    M1,
    N1,
}

/// Parameters of the holomorphic averaged functions
/// `M₁ = a + b r + c r² + α r atanh r`, `N₁ = c + (b-κ) r + a r² + α r atanh r`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HolomorphicParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub kappa: f64,
}

impl HolomorphicParams {
    /// Reads the holomorphic parameters off a general parameter set.
    /// The transcendental coefficient is `γ` and `κ = -ρ`.
    pub fn from_params(p: &MelnikovParams) -> Result<Self> {
        let stray = [("d", p.d), ("alpha", p.alpha), ("beta", p.beta), ("kappa", p.kappa)];
        if let Some((name, v)) = stray.iter().find(|(_, v)| *v != 0.0) {
            return Err(Error::UnreachableTarget(format!(
                "{name} = {v} is nonzero, parameters are not holomorphic"
            )));
        }
        Ok(HolomorphicParams { a: p.a, b: p.b, c: p.c, alpha: p.gamma, kappa: -p.rho })
    }

    pub fn to_params(&self) -> MelnikovParams {
        MelnikovParams {
            a: self.a,
            b: self.b,
            c: self.c,
            gamma: self.alpha,
            rho: -self.kappa,
            ..MelnikovParams::default()
        }
    }
}

pub fn eval_holomorphic(params: &HolomorphicParams, m: usize, which: Which, r: f64) -> Result<f64> {
    if m > 3 {
        return Err(Error::UnsupportedDegree { m, max: 3 });
    }
    if m <= 2 && (params.alpha != 0.0 || params.kappa != 0.0) {
        return Err(Error::Domain(format!(
            "alpha and kappa must vanish for holomorphic m={m}"
        )));
    }
    let r = check_radius(r)?;
    let tail = params.alpha * r * atanh(r);
    Ok(match which {
        Which::M1 => params.a + params.b * r + params.c * r * r + tail,
        Which::N1 => params.c + (params.b - params.kappa) * r + params.a * r * r + tail,
    })
}
