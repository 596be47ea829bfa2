//! Root counts of one-parameter polynomial families `F_κ(r) = Σ cᵢ(κ) rⁱ` on a fixed
//! interval. The count can only change where `Δ_r(F_κ)` vanishes, where an endpoint
//! becomes a root, or where the degree drops; between such values it is constant.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::poly::{discriminant, isolate_real_roots, rational_from_f64, rational_to_f64, sturm_count, Bound, RationalPolynomial};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ParametricFamily {
    /// `coefficients[i]` multiplies `rⁱ`.
    coefficients: Vec<RationalPolynomial>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootRegion {
    /// `-inf` / `+inf` for unbounded ends.
    pub lo: f64,
    pub hi: f64,
    pub sample: f64,
    pub count: usize,
    pub certified: bool,
}

impl ParametricFamily {
    pub fn new(mut coefficients: Vec<RationalPolynomial>) -> Result<Self> {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            return Err(Error::DegenerateFamily("the family is identically zero".into()));
        }
        Ok(ParametricFamily { coefficients })
    }

    pub fn degree_in_r(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn at(&self, kappa: &BigRational) -> RationalPolynomial {
        RationalPolynomial::new(self.coefficients.iter().map(|c| c.eval(kappa)).collect())
    }

    /// `κ ↦ F_κ(x)` for a fixed `x`.
    pub fn at_point(&self, x: &BigRational) -> RationalPolynomial {
        let mut acc = RationalPolynomial::zero();
        let mut pow = BigRational::one();
        for c in &self.coefficients {
            acc = &acc + &c.scale(&pow);
            pow *= x;
        }
        acc
    }

    pub fn leading(&self) -> &RationalPolynomial {
        self.coefficients.last().expect("non-empty")
    }

    /// `Δ_r(F_κ)` as an exact polynomial in `κ`, by interpolation at rational nodes
    /// where the leading coefficient does not vanish.
    pub fn discriminant_in_kappa(&self) -> Result<RationalPolynomial> {
        let n = self.degree_in_r();
        if n < 2 {
            return Err(Error::DegreeTooSmall(format!("family has degree {n} in r")));
        }
        let d = self.coefficients.iter().filter_map(|c| c.degree()).max().unwrap_or(0);
        let needed = (2 * n - 2) * d + 1;
        let mut xs = Vec::with_capacity(needed);
        let mut ys = Vec::with_capacity(needed);
        let mut k: i64 = 0;
        while xs.len() < needed {
            let node = BigRational::from_integer(k.into());
            k += 1;
            if self.leading().eval(&node).is_zero() {
                continue;
            }
            ys.push(discriminant(&self.at(&node))?);
            xs.push(node);
        }
        Ok(interpolate(&xs, &ys))
    }
}

/// Lagrange interpolation over ℚ.
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> RationalPolynomial {
    let mut out = RationalPolynomial::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = RationalPolynomial::constant(yi.clone());
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                let factor = RationalPolynomial::new(vec![-xj.clone(), BigRational::one()]);
                basis = (&basis * &factor).scale(&(xi - xj).recip());
            }
        }
        out = &out + &basis;
    }
    out
}

fn to_bound(x: f64, upper: bool) -> Result<Bound> {
    if x.is_infinite() {
        Ok(if upper { Bound::PosInfinity } else { Bound::NegInfinity })
    } else {
        Ok(Bound::At(rational_from_f64(x)?))
    }
}

fn region_count(family: &ParametricFamily, kappa: &BigRational, a: &BigRational, b: &BigRational) -> Result<usize> {
    sturm_count(&family.at(kappa), a, b)
}

/// Splits the `κ` window into open regions of constant root count of `F_κ` on `(a, b)`.
pub fn parametric_root_regions(family: &ParametricFamily, window: (f64, f64), interval: (f64, f64)) -> Result<Vec<RootRegion>> {
    let (k_lo, k_hi) = window;
    if k_lo.is_nan() || k_hi.is_nan() || k_lo >= k_hi {
        return Err(Error::Domain(format!("empty parameter window ({k_lo}, {k_hi})")));
    }
    if !(interval.0 < interval.1) || !interval.0.is_finite() || !interval.1.is_finite() {
        return Err(Error::Domain("the root interval must be finite and nonempty".into()));
    }
    let a = rational_from_f64(interval.0)?;
    let b = rational_from_f64(interval.1)?;
    let delta = family.discriminant_in_kappa()?;
    if delta.is_zero() {
        return Err(Error::DegenerateFamily("the discriminant vanishes identically in the parameter".into()));
    }
    let end_a = family.at_point(&a);
    let end_b = family.at_point(&b);
    if end_a.is_zero() || end_b.is_zero() {
        return Err(Error::DegenerateFamily("an interval endpoint is a root for every parameter value".into()));
    }
    let mut critical = &(&delta * &end_a) * &end_b;
    if family.leading().degree().unwrap_or(0) > 0 {
        critical = &critical * family.leading();
    }
    let lo_b = to_bound(k_lo, false)?;
    let hi_b = to_bound(k_hi, true)?;
    // the window ends may themselves be critical (the model family drops degree at
    // κ = 1); divide those factors out so the open window can be searched exactly
    for b in [&lo_b, &hi_b] {
        if let Bound::At(x) = b {
            let factor = RationalPolynomial::new(vec![-x.clone(), BigRational::one()]);
            while !critical.is_zero() && critical.eval(x).is_zero() {
                critical = critical.div_rem(&factor).0;
            }
        }
    }
    let width = BigRational::new(1.into(), num_bigint::BigInt::from(1u64 << 50));
    let roots = isolate_real_roots(&critical, &lo_b, &hi_b, &width)?;

    let mut edges: Vec<(Option<BigRational>, Option<BigRational>, f64, f64)> = Vec::new();
    let mut prev_q = match &lo_b {
        Bound::At(x) => Some(x.clone()),
        _ => None,
    };
    let mut prev_f = k_lo;
    for r in &roots {
        edges.push((prev_q.clone(), Some(r.lo.clone()), prev_f, r.midpoint()));
        prev_q = Some(r.hi.clone());
        prev_f = r.midpoint();
    }
    let last_q = match &hi_b {
        Bound::At(x) => Some(x.clone()),
        _ => None,
    };
    edges.push((prev_q, last_q, prev_f, k_hi));

    let mut regions = Vec::with_capacity(edges.len());
    for (lo_q, hi_q, lo_f, hi_f) in edges {
        let samples = sample_points(lo_q.as_ref(), hi_q.as_ref());
        let counts: Vec<Option<usize>> = samples.iter().map(|k| region_count(family, k, &a, &b).ok()).collect();
        let hypotheses = samples.iter().all(|k| {
            !delta.eval(k).is_zero() && !end_a.eval(k).is_zero() && !end_b.eval(k).is_zero() && !family.leading().eval(k).is_zero()
        });
        let count = counts[0];
        let consistent = counts.iter().all(|c| c.is_some() && *c == count);
        regions.push(RootRegion {
            lo: lo_f,
            hi: hi_f,
            sample: rational_to_f64(&samples[0]),
            count: count.unwrap_or(0),
            certified: hypotheses && consistent,
        });
    }
    Ok(regions)
}

/// Midpoint plus two interior checks; unbounded sides step outward.
fn sample_points(lo: Option<&BigRational>, hi: Option<&BigRational>) -> Vec<BigRational> {
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let four = BigRational::from_integer(4.into());
    match (lo, hi) {
        (Some(l), Some(h)) => {
            let w = h - l;
            vec![(l + h) / &two, l + &w / &four, h - &w / &four]
        }
        (Some(l), None) => vec![l + &one, l + &two, l + BigRational::from_integer(1000.into())],
        (None, Some(h)) => vec![h - &one, h - &two, h - BigRational::from_integer(1000.into())],
        (None, None) => vec![BigRational::zero(), one.clone(), -one],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootkit::poly::rational;

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = RationalPolynomial::from_ratios(&[(1, 3), (-2, 1), (0, 1), (5, 7)]);
        let xs: Vec<_> = (0..4).map(|k| rational(k, 1)).collect();
        let ys: Vec<_> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }

    #[test]
    fn constant_family_single_region() {
        let c = |v: i64| RationalPolynomial::from_i64(&[v]);
        // 8r² - 6r + 1 = (2r - 1)(4r - 1)
        let fam = ParametricFamily::new(vec![c(1), c(-6), c(8)]).unwrap();
        let regions = parametric_root_regions(&fam, (-5.0, 5.0), (0.0, 1.0)).unwrap();
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].count, 2);
        assert!(regions[0].certified);
    }

    #[test]
    fn moving_root_splits_window() {
        // r² - κ on (0,1): one root for κ ∈ (0,1), none otherwise
        let fam = ParametricFamily::new(vec![
            RationalPolynomial::from_i64(&[0, -1]),
            RationalPolynomial::zero(),
            RationalPolynomial::from_i64(&[1]),
        ])
        .unwrap();
        let regions = parametric_root_regions(&fam, (-2.0, f64::INFINITY), (0.0, 1.0)).unwrap();
        let counts: Vec<usize> = regions.iter().map(|r| r.count).collect();
        assert_eq!(counts, vec![0, 1, 0]);
        assert!((regions[1].lo - 0.0).abs() < 1e-12 && (regions[1].hi - 1.0).abs() < 1e-12);
        assert!(regions[2].hi.is_infinite());
    }

    #[test]
    fn degenerate_family() {
        // (r - κ)²: discriminant vanishes for every κ
        let fam = ParametricFamily::new(vec![
            RationalPolynomial::from_i64(&[0, 0, 1]),
            RationalPolynomial::from_i64(&[0, -2]),
            RationalPolynomial::from_i64(&[1]),
        ])
        .unwrap();
        assert!(matches!(parametric_root_regions(&fam, (0.0, 1.0), (0.0, 1.0)), Err(Error::DegenerateFamily(_))));
    }
}
