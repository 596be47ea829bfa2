//! Exact univariate polynomials over ℚ: Sturm counts, root isolation, Descartes bounds,
//! resultants and discriminants.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Ascending coefficients; trailing zeros are always trimmed, so the zero polynomial
/// has no coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "RationalPolynomial[{}]", parts.join(", "))
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact value of a finite double.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("{x} is not a finite number")))
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::new(coeffs.iter().map(|&(n, d)| rational(n, d)).collect())
    }

    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        Ok(Self::new(coeffs.iter().map(|&c| rational_from_f64(c)).collect::<Result<_>>()?))
    }

    /// `∏ (x - rᵢ)`.
    pub fn from_roots(roots: &[BigRational]) -> Self {
        roots.iter().fold(Self::constant(BigRational::one()), |acc, r| {
            &acc * &Self::new(vec![-r.clone(), BigRational::one()])
        })
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn to_f64_coefficients(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + rational_to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(BigRational::one()), |acc, _| &acc * self)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.coeffs[d].recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(d)];
        while rem.len() > d && !rem.is_empty() {
            let k = rem.len() - 1;
            let factor = &rem[k] * &lead_inv;
            if !factor.is_zero() {
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    rem[k - d + i] -= &factor * c;
                }
                quot[k - d] = factor;
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same distinct roots, all simple.
    pub fn square_free(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Positive rational multiple with coprime integer coefficients.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        ints.into_iter().map(|c| c / &g).collect()
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                    match rhs.coeffs.get(i) {
                        Some(b) => a + b,
                        None => a,
                    }
                })
                .collect(),
        )
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }
}

/// Sign of an integer polynomial at `num/den` (`den > 0`), via homogeneous Horner.
fn int_sign_at(p: &[BigInt], num: &BigInt, den: &BigInt) -> i8 {
    let mut acc = BigInt::zero();
    let mut den_pow = BigInt::one();
    for c in p.iter().rev() {
        acc = acc * num + c * &den_pow;
        den_pow *= den;
    }
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

fn int_sign_at_infinity(p: &[BigInt], positive: bool) -> i8 {
    let Some(lead) = p.last() else { return 0 };
    let s: i8 = if lead.is_positive() { 1 } else { -1 };
    if positive || (p.len() - 1) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Sign of `p` at a rational point.
pub fn sign_at(p: &RationalPolynomial, x: &BigRational) -> i8 {
    int_sign_at(&p.primitive_integer(), x.numer(), x.denom())
}

/// A Sturm chain stored as primitive integer polynomials (positive multiples of the
/// rational chain, so sign variations are unchanged).
#[derive(Debug, Clone)]
pub struct SturmSequence {
    chain: Vec<Vec<BigInt>>,
}

/// A point of the extended real line for root counting.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    NegInfinity,
    At(BigRational),
    PosInfinity,
}

impl SturmSequence {
    pub fn new(p: &RationalPolynomial) -> Self {
        let mut chain = Vec::new();
        if !p.is_zero() {
            let mut a = p.clone();
            let mut b = p.derivative();
            chain.push(a.primitive_integer());
            while !b.is_zero() {
                chain.push(b.primitive_integer());
                let r = a.div_rem(&b).1;
                a = b;
                b = -&r;
            }
        }
        SturmSequence { chain }
    }

    fn signs(&self, at: &Bound) -> Vec<i8> {
        self.chain
            .iter()
            .map(|p| match at {
                Bound::NegInfinity => int_sign_at_infinity(p, false),
                Bound::PosInfinity => int_sign_at_infinity(p, true),
                Bound::At(x) => int_sign_at(p, x.numer(), x.denom()),
            })
            .collect()
    }

    pub fn variations(&self, at: &Bound) -> usize {
        let signs: Vec<i8> = self.signs(at).into_iter().filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Sign of the polynomial itself at `at`.
    pub fn sign(&self, at: &Bound) -> i8 {
        match self.chain.first() {
            None => 0,
            Some(p) => match at {
                Bound::NegInfinity => int_sign_at_infinity(p, false),
                Bound::PosInfinity => int_sign_at_infinity(p, true),
                Bound::At(x) => int_sign_at(p, x.numer(), x.denom()),
            },
        }
    }

    /// Distinct real roots in the open interval; the endpoints must not be roots.
    pub fn count(&self, lo: &Bound, hi: &Bound) -> Result<usize> {
        for b in [lo, hi] {
            if let Bound::At(x) = b {
                if self.sign(b) == 0 {
                    return Err(Error::EndpointRoot(x.to_string()));
                }
            }
        }
        let (vl, vh) = (self.variations(lo), self.variations(hi));
        Ok(vl.saturating_sub(vh))
    }
}

/// Exact number of distinct real roots of `p` in `(lo, hi)`.
pub fn sturm_count(p: &RationalPolynomial, lo: &BigRational, hi: &BigRational) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Domain("the zero polynomial has no finite root count".into()));
    }
    if lo >= hi {
        return Err(Error::Domain(format!("empty interval ({lo}, {hi})")));
    }
    SturmSequence::new(p).count(&Bound::At(lo.clone()), &Bound::At(hi.clone()))
}

/// Sign variations of the nonzero coefficient sequence.
pub fn descartes_bound(p: &RationalPolynomial) -> usize {
    let signs: Vec<bool> = p.coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `Res(p, q)` by the Euclidean recurrence
/// `Res(A, B) = (-1)^{mn} lc(B)^{m - deg R} Res(B, R)` with `R = A mod B`.
pub fn resultant(p: &RationalPolynomial, q: &RationalPolynomial) -> BigRational {
    let (Some(m), Some(n)) = (p.degree(), q.degree()) else {
        return BigRational::zero();
    };
    if n == 0 {
        return num_traits::pow(q.coeffs[0].clone(), m);
    }
    if m == 0 {
        return num_traits::pow(p.coeffs[0].clone(), n);
    }
    let sign = if (m * n) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    if m < n {
        return sign * resultant(q, p);
    }
    let r = p.div_rem(q).1;
    let Some(k) = r.degree() else {
        return BigRational::zero();
    };
    sign * num_traits::pow(q.coeffs[n].clone(), m - k) * resultant(q, &r)
}

/// `Δ(p) = (-1)^{n(n-1)/2} Res(p, p') / aₙ`.
pub fn discriminant(p: &RationalPolynomial) -> Result<BigRational> {
    let n = p.degree().unwrap_or(0);
    if n < 2 {
        return Err(Error::DegreeTooSmall(format!("discriminant needs degree >= 2, got {n}")));
    }
    let res = resultant(p, &p.derivative());
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    Ok(sign * res / &p.coeffs[n])
}

/// An interval `[lo, hi]` holding exactly one root; `lo == hi` marks an exact rational root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootInterval {
    pub fn midpoint(&self) -> f64 {
        rational_to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }
}

fn split_point(lo: &BigRational, hi: &BigRational, sturm: &SturmSequence) -> BigRational {
    let two = BigRational::from_integer(2.into());
    let mid = (lo + hi) / &two;
    if sturm.sign(&Bound::At(mid.clone())) != 0 {
        return mid;
    }
    // shift off an exact root; roots are isolated so some nearby dyadic is not one
    let mut step = (hi - lo) / BigRational::from_integer(1024.into());
    loop {
        let c = &mid + &step;
        if sturm.sign(&Bound::At(c.clone())) != 0 {
            return c;
        }
        step /= &two;
    }
}

/// Isolates the distinct real roots of `p` in `(lo, hi)` (endpoints must not be roots),
/// each refined to width at most `width`. Sorted ascending.
pub fn isolate_real_roots(p: &RationalPolynomial, lo: &Bound, hi: &Bound, width: &BigRational) -> Result<Vec<RootInterval>> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let sf = p.square_free();
    let sturm = SturmSequence::new(&sf);
    let total = sturm.count(lo, hi)?;
    if total == 0 {
        return Ok(Vec::new());
    }
    // finite enclosing bounds from the Cauchy bound
    let lead = sf.leading().expect("nonzero").abs();
    let cauchy = BigRational::one() + sf.coeffs.iter().map(|c| c.abs() / &lead).fold(BigRational::zero(), |a, b| a.max(b));
    let lo_q = match lo {
        Bound::At(x) => x.clone(),
        _ => -cauchy.clone(),
    };
    let hi_q = match hi {
        Bound::At(x) => x.clone(),
        _ => cauchy.clone(),
    };
    let mut out = Vec::new();
    let mut stack = vec![(lo_q, hi_q, total)];
    while let Some((a, b, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(refine(&sturm, a, b, width));
            continue;
        }
        let c = split_point(&a, &b, &sturm);
        let left = sturm.count(&Bound::At(a.clone()), &Bound::At(c.clone()))?;
        stack.push((c.clone(), b, n - left));
        stack.push((a, c, left));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(out)
}

fn refine(sturm: &SturmSequence, mut a: BigRational, mut b: BigRational, width: &BigRational) -> RootInterval {
    let two = BigRational::from_integer(2.into());
    let sa = sturm.sign(&Bound::At(a.clone()));
    while &b - &a > *width {
        let c = (&a + &b) / &two;
        let sc = sturm.sign(&Bound::At(c.clone()));
        if sc == 0 {
            return RootInterval { lo: c.clone(), hi: c };
        }
        if sc == sa {
            a = c;
        } else {
            b = c;
        }
    }
    RootInterval { lo: a, hi: b }
}
