//! Perturbation data and the linear maps between perturbation coefficients and the
//! nine Melnikov parameters `(a, b, c, d, α, β, γ, κ, ρ)`.
//!
//! The perturbation on each side of the switching line is
//! `R±(z, z̄) = Σ_{l<=m} Σ_{k<=l} conj(a±_{k,l}) z^{l-k} z̄^k`.
//!
//! The coefficient map is assembled from the per-block closed forms in
//! [`crate::closed`]: each block contributes `Im(a+) - Im(a-)` times its imaginary
//! coordinate vector and `Re(a+) + Re(a-)` times its real one. `κ` and `ρ` are read from
//! the reflected spec, so every table entry below is derived, not transcribed.
//!
//! # Right inverse
//!
//! [`params_to_perturbation`] solves for a preimage using only upper-side coefficients
//! (`a-_{k,l} = 0`) and a fixed set of real unknowns per degree:
//!
//! | degree | unknowns (upper side)                       | parameters hit      |
//! |--------|---------------------------------------------|---------------------|
//! | 0      | Im a00, Re a00                              | a, b (c = -a)       |
//! | 1      | + Im a01, Re a11, Im a11                    | + c, d, α           |
//! | 2      | + Re a12, Im a12                            | + κ, β              |
//! | 3      | + Re a03, Im a03                            | + ρ, γ              |
//!
//! For holomorphic perturbations only `a_{0,l}` may be nonzero; the unknowns are
//! `Im a00, Re a00, Im a01` (degrees 1 and 2) plus `Re a03, Im a03` at degree 3.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closed::{BlockForm, BLOCKS, F_LEN};
use crate::error::{Error, Result};

/// Highest degree with closed-form coefficient maps.
pub const MAX_CLOSED_DEGREE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// Index of `a_{k,l}` in a flattened triangular table.
pub fn slot(k: usize, l: usize) -> usize {
    l * (l + 1) / 2 + k
}

pub fn table_len(m: usize) -> usize {
    (m + 1) * (m + 2) / 2
}

/// Degree `m` and the coefficient tables `a+_{k,l}`, `a-_{k,l}` (`0 <= k <= l <= m`).
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    m: usize,
    holomorphic: bool,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
}

impl PerturbationSpec {
    pub fn zero(m: usize, holomorphic: bool) -> Self {
        let n = table_len(m);
        PerturbationSpec {
            m,
            holomorphic,
            plus: vec![Complex64::new(0.0, 0.0); n],
            minus: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Builds a spec from flattened tables (row `l` holds `k = 0..=l`).
    pub fn from_tables(
        m: usize,
        holomorphic: bool,
        plus: Vec<Complex64>,
        minus: Vec<Complex64>,
    ) -> Result<Self> {
        let spec = PerturbationSpec { m, holomorphic, plus, minus };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = table_len(self.m);
        for (name, t) in [("plus", &self.plus), ("minus", &self.minus)] {
            if t.len() != n {
                return Err(Error::InvalidSpec(format!(
                    "{name} table has {} entries, expected {n} for m={}",
                    t.len(),
                    self.m
                )));
            }
            if let Some(bad) = t.iter().find(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} table has a non-finite entry {bad}")));
            }
        }
        if self.holomorphic {
            for l in 0..=self.m {
                for k in 1..=l {
                    let s = slot(k, l);
                    if self.plus[s] != Complex64::new(0.0, 0.0) || self.minus[s] != Complex64::new(0.0, 0.0) {
                        return Err(Error::InvalidSpec(format!(
                            "holomorphic spec has nonzero a_{{{k},{l}}}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Entries uniform in the unit square; only `k = 0` entries when holomorphic.
    pub fn random<R: rand::Rng>(m: usize, holomorphic: bool, rng: &mut R) -> Self {
        let mut spec = PerturbationSpec::zero(m, holomorphic);
        for l in 0..=m {
            for k in 0..=l {
                if holomorphic && k > 0 {
                    continue;
                }
                let s = slot(k, l);
                spec.plus[s] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                spec.minus[s] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        spec
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn holomorphic(&self) -> bool {
        self.holomorphic
    }

    pub fn get(&self, side: Side, k: usize, l: usize) -> Complex64 {
        match side {
            Side::Plus => self.plus[slot(k, l)],
            Side::Minus => self.minus[slot(k, l)],
        }
    }

    /// Sets one coefficient. Fails if the spec is holomorphic and `k >= 1`.
    pub fn set(&mut self, side: Side, k: usize, l: usize, value: Complex64) -> Result<()> {
        if k > l || l > self.m {
            return Err(Error::InvalidSpec(format!("a_{{{k},{l}}} is outside the table for m={}", self.m)));
        }
        if self.holomorphic && k >= 1 && value != Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidSpec(format!("holomorphic spec cannot set a_{{{k},{l}}}")));
        }
        match side {
            Side::Plus => self.plus[slot(k, l)] = value,
            Side::Minus => self.minus[slot(k, l)] = value,
        }
        Ok(())
    }

    pub fn table(&self, side: Side) -> &[Complex64] {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    /// Iterates `(k, l, a+, a-)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64, Complex64)> + '_ {
        (0..=self.m).flat_map(move |l| {
            (0..=l).map(move |k| (k, l, self.plus[slot(k, l)], self.minus[slot(k, l)]))
        })
    }

    /// `λ·self + other`; the degrees must match.
    pub fn axpy(&self, lambda: f64, other: &PerturbationSpec) -> Result<PerturbationSpec> {
        if self.m != other.m {
            return Err(Error::InvalidSpec("degree mismatch".into()));
        }
        let comb = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(a, b)| a * lambda + b).collect();
        Ok(PerturbationSpec {
            m: self.m,
            holomorphic: self.holomorphic && other.holomorphic,
            plus: comb(&self.plus, &other.plus),
            minus: comb(&self.minus, &other.minus),
        })
    }

    /// Perturbation `R±(z, z̄)` at `z`.
    pub fn eval(&self, side: Side, z: Complex64) -> Complex64 {
        let table = self.table(side);
        let zb = z.conj();
        let mut zp = vec![Complex64::new(1.0, 0.0); self.m + 1];
        let mut zbp = vec![Complex64::new(1.0, 0.0); self.m + 1];
        for i in 1..=self.m {
            zp[i] = zp[i - 1] * z;
            zbp[i] = zbp[i - 1] * zb;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..=self.m {
            for k in 0..=l {
                acc += table[slot(k, l)].conj() * zp[l - k] * zbp[k];
            }
        }
        acc
    }
}

/// The nine real parameters of the averaged functions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MelnikovParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub rho: f64,
}

pub const PARAM_NAMES: [&str; 9] = ["a", "b", "c", "d", "alpha", "beta", "gamma", "kappa", "rho"];

impl MelnikovParams {
    pub fn to_array(&self) -> [f64; 9] {
        [self.a, self.b, self.c, self.d, self.alpha, self.beta, self.gamma, self.kappa, self.rho]
    }

    pub fn from_array(v: [f64; 9]) -> Self {
        MelnikovParams {
            a: v[0],
            b: v[1],
            c: v[2],
            d: v[3],
            alpha: v[4],
            beta: v[5],
            gamma: v[6],
            kappa: v[7],
            rho: v[8],
        }
    }

    pub fn max_abs_diff(&self, other: &MelnikovParams) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Checks the degree restrictions; `tol = 0` demands exact zeros.
    pub fn check_degree(&self, m: usize, tol: f64) -> Result<()> {
        let must_vanish: &[usize] = match m {
            0 => &[3, 4, 5, 6, 7, 8],
            1 => &[5, 6, 7, 8],
            2 => &[6, 8],
            _ => &[],
        };
        let v = self.to_array();
        for &i in must_vanish {
            if v[i].abs() > tol {
                return Err(Error::UnreachableTarget(format!(
                    "{} = {} must vanish for m={m}",
                    PARAM_NAMES[i], v[i]
                )));
            }
        }
        if m == 0 && (self.c + self.a).abs() > tol {
            return Err(Error::UnreachableTarget(format!(
                "c = {} must equal -a = {} for m=0",
                self.c, -self.a
            )));
        }
        Ok(())
    }

    /// Checks that the parameters are reachable by a holomorphic perturbation of degree `m`.
    pub fn check_holomorphic(&self, m: usize, tol: f64) -> Result<()> {
        self.check_degree(m, tol)?;
        let mut must_vanish = vec![3, 4, 5, 7];
        if m <= 2 {
            must_vanish.extend([6, 8]);
        }
        let v = self.to_array();
        for i in must_vanish {
            if v[i].abs() > tol {
                return Err(Error::UnreachableTarget(format!(
                    "{} = {} must vanish for holomorphic m={m}",
                    PARAM_NAMES[i], v[i]
                )));
            }
        }
        Ok(())
    }
}

/// Per-block rows of the coefficient map: how one unit of `Im(a+)-Im(a-)` and of
/// `Re(a+)+Re(a-)` at `(k, l)` moves each of the nine parameters.
#[derive(Debug, Clone, Copy)]
pub struct MapRow {
    pub k: usize,
    pub l: usize,
    pub im: [f64; 9],
    pub re: [f64; 9],
}

fn map_row(b: &BlockForm) -> MapRow {
    // The reflected spec feeds Im-differences scaled by (-1)^(l+1) and Re-sums scaled by (-1)^l.
    let parity = if b.l % 2 == 0 { 1.0 } else { -1.0 };
    let lift = |v: &[f64; F_LEN], n_scale: f64| {
        let mut out = [0.0; 9];
        out[..F_LEN].copy_from_slice(v);
        let n1 = v[1] * n_scale;
        let n3 = v[3] * n_scale;
        // κ = N[3] + d,  ρ = N[1] + N[3] - b - d
        out[7] = n3 + v[3];
        out[8] = n1 + n3 - v[1] - v[3];
        out
    };
    MapRow { k: b.k, l: b.l, im: lift(&b.im, -parity), re: lift(&b.re, parity) }
}

/// The full derived coefficient map, one row per block `(k, l)` with `l <= 3`.
pub fn coefficient_map() -> Vec<MapRow> {
    BLOCKS.iter().map(map_row).collect()
}

pub fn melnikov_params(spec: &PerturbationSpec) -> Result<MelnikovParams> {
    if spec.m > MAX_CLOSED_DEGREE {
        return Err(Error::UnsupportedDegree { m: spec.m, max: MAX_CLOSED_DEGREE });
    }
    let mut acc = [0.0; 9];
    for row in coefficient_map() {
        if row.l > spec.m {
            continue;
        }
        let p = spec.get(Side::Plus, row.k, row.l);
        let q = spec.get(Side::Minus, row.k, row.l);
        let im = p.im - q.im;
        let re = p.re + q.re;
        for i in 0..9 {
            if row.im[i] != 0.0 {
                acc[i] += row.im[i] * im;
            }
            if row.re[i] != 0.0 {
                acc[i] += row.re[i] * re;
            }
        }
    }
    Ok(MelnikovParams::from_array(acc))
}

/// Swaps the sides and multiplies each `a_{k,l}` by `(-1)^l`; `N₁(spec) = M₁(reflect(spec))`.
pub fn reflect(spec: &PerturbationSpec) -> PerturbationSpec {
    let mut out = PerturbationSpec::zero(spec.m, spec.holomorphic);
    for l in 0..=spec.m {
        let s = if l % 2 == 0 { 1.0 } else { -1.0 };
        for k in 0..=l {
            let i = slot(k, l);
            out.plus[i] = spec.minus[i] * s;
            out.minus[i] = spec.plus[i] * s;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Re,
    Im,
}

fn designated_unknowns(m: usize, holomorphic: bool) -> Vec<(usize, usize, Part)> {
    let mut u = vec![(0, 0, Part::Im), (0, 0, Part::Re)];
    if m >= 1 {
        u.push((0, 1, Part::Im));
        if !holomorphic {
            u.extend([(1, 1, Part::Re), (1, 1, Part::Im)]);
        }
    }
    if m >= 2 && !holomorphic {
        u.extend([(1, 2, Part::Re), (1, 2, Part::Im)]);
    }
    if m >= 3 {
        u.extend([(0, 3, Part::Re), (0, 3, Part::Im)]);
    }
    u
}

fn free_params(m: usize, holomorphic: bool) -> Vec<usize> {
    match (m, holomorphic) {
        (0, _) => vec![0, 1],
        (1 | 2, true) => vec![0, 1, 2],
        (3, true) => vec![0, 1, 2, 6, 8],
        (1, false) => vec![0, 1, 2, 3, 4],
        (2, false) => vec![0, 1, 2, 3, 4, 5, 7],
        _ => (0..9).collect(),
    }
}

/// A preimage of `params` under [`melnikov_params`] on the designated coefficient slice.
pub fn params_to_perturbation(params: &MelnikovParams, m: usize, holomorphic: bool) -> Result<PerturbationSpec> {
    if m > MAX_CLOSED_DEGREE {
        return Err(Error::UnsupportedDegree { m, max: MAX_CLOSED_DEGREE });
    }
    let scale = 1.0 + params.to_array().iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let tol = 1e-12 * scale;
    if holomorphic {
        params.check_holomorphic(m, tol)?;
    } else {
        params.check_degree(m, tol)?;
    }
    let unknowns = designated_unknowns(m, holomorphic);
    let rows = free_params(m, holomorphic);
    debug_assert_eq!(unknowns.len(), rows.len());
    let map = coefficient_map();
    let n = rows.len();
    let mut mat = DMatrix::<f64>::zeros(n, n);
    for (j, &(k, l, part)) in unknowns.iter().enumerate() {
        let row = map.iter().find(|r| r.k == k && r.l == l).expect("block exists");
        let col = match part {
            Part::Im => &row.im,
            Part::Re => &row.re,
        };
        for (i, &p) in rows.iter().enumerate() {
            mat[(i, j)] = col[p];
        }
    }
    let target = params.to_array();
    let rhs = DVector::from_iterator(n, rows.iter().map(|&p| target[p]));
    let sol = mat
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::UnreachableTarget("designated slice is singular".into()))?;
    let mut spec = PerturbationSpec::zero(m, holomorphic);
    for (j, &(k, l, part)) in unknowns.iter().enumerate() {
        let mut v = spec.get(Side::Plus, k, l);
        match part {
            Part::Re => v.re = sol[j],
            Part::Im => v.im = sol[j],
        }
        spec.set(Side::Plus, k, l, v)?;
    }
    Ok(spec)
}

// JSON

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    m: usize,
    holomorphic: bool,
    plus: Vec<Vec<ComplexJson>>,
    minus: Vec<Vec<ComplexJson>>,
}

fn rows_to_table(name: &str, m: usize, rows: Vec<Vec<ComplexJson>>) -> Result<Vec<Complex64>> {
    if rows.len() != m + 1 {
        return Err(Error::InvalidSpec(format!("{name} has {} rows, expected {}", rows.len(), m + 1)));
    }
    let mut out = Vec::with_capacity(table_len(m));
    for (l, row) in rows.into_iter().enumerate() {
        if row.len() != l + 1 {
            return Err(Error::InvalidSpec(format!(
                "{name} row {l} has {} entries, expected {}",
                row.len(),
                l + 1
            )));
        }
        out.extend(row.into_iter().map(|c| Complex64::new(c.re, c.im)));
    }
    Ok(out)
}

fn table_to_rows(m: usize, t: &[Complex64]) -> Vec<Vec<ComplexJson>> {
    (0..=m)
        .map(|l| (0..=l).map(|k| ComplexJson { re: t[slot(k, l)].re, im: t[slot(k, l)].im }).collect())
        .collect()
}

impl PerturbationSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SpecJson = serde_json::from_str(text)?;
        let plus = rows_to_table("plus", raw.m, raw.plus)?;
        let minus = rows_to_table("minus", raw.m, raw.minus)?;
        PerturbationSpec::from_tables(raw.m, raw.holomorphic, plus, minus)
    }

    pub fn to_json(&self) -> String {
        let raw = SpecJson {
            m: self.m,
            holomorphic: self.holomorphic,
            plus: table_to_rows(self.m, &self.plus),
            minus: table_to_rows(self.m, &self.minus),
        };
        serde_json::to_string_pretty(&raw).expect("spec serializes")
    }
}

impl Serialize for PerturbationSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson {
            m: self.m,
            holomorphic: self.holomorphic,
            plus: table_to_rows(self.m, &self.plus),
            minus: table_to_rows(self.m, &self.minus),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PerturbationSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SpecJson::deserialize(d)?;
        let conv = || -> Result<PerturbationSpec> {
            let plus = rows_to_table("plus", raw.m, raw.plus)?;
            let minus = rows_to_table("minus", raw.m, raw.minus)?;
            PerturbationSpec::from_tables(raw.m, raw.holomorphic, plus, minus)
        };
        conv().map_err(serde::de::Error::custom)
    }
}
