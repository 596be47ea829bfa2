//! Dormand–Prince 5(4) for complex scalar equations, with the standard quartic dense output.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub t0: f64,
    pub h: f64,
    pub y0: Complex64,
    pub y1: Complex64,
    cont: [Complex64; 5],
}

impl Step {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t ∈ [t0, t0 + h]`.
    pub fn at(&self, t: f64) -> Complex64 {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = self.cont;
        r1 + (r2 + (r3 + (r4 + r5 * s1) * s) * s1) * s
    }
}

fn err_component(e: f64, y0: f64, y1: f64, tol: &Tolerances) -> f64 {
    e / (tol.atol + tol.rtol * y0.abs().max(y1.abs()))
}

/// Adaptive stepper; call [`Stepper::step`] repeatedly.
pub struct Stepper<F: Fn(f64, Complex64) -> Complex64> {
    f: F,
    tol: Tolerances,
    pub t: f64,
    pub y: Complex64,
    k1: Complex64,
    h: f64,
    pub steps: usize,
}

impl<F: Fn(f64, Complex64) -> Complex64> Stepper<F> {
    pub fn new(f: F, t0: f64, y0: Complex64, tol: Tolerances) -> Self {
        let k1 = f(t0, y0);
        let scale = tol.atol + tol.rtol * y0.norm();
        let d0 = y0.norm() / scale;
        let d1 = k1.norm() / scale;
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        Stepper { f, tol, t: t0, y: y0, k1, h: h.min(0.1), steps: 0 }
    }

    pub fn set_step(&mut self, h: f64) {
        self.h = h;
    }

    /// Takes one accepted step of at most `h_max`.
    pub fn step(&mut self, h_max: f64) -> Result<Step> {
        let (t, y, k1) = (self.t, self.y, self.k1);
        let f = &self.f;
        let mut h = self.h.min(h_max);
        loop {
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow(t));
            }
            let k2 = f(t + C2 * h, y + h * A21 * k1);
            let k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2));
            let k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
            let k5 = f(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
            let k6 = f(t + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
            let y1 = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
            let k7 = f(t + h, y1);
            let e = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
            let er = err_component(e.re.abs(), y.re, y1.re, &self.tol);
            let ei = err_component(e.im.abs(), y.im, y1.im, &self.tol);
            let err = ((er * er + ei * ei) / 2.0).sqrt();
            if !err.is_finite() {
                h *= 0.1;
                continue;
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 10.0);
            if err <= 1.0 {
                let ydiff = y1 - y;
                let bspl = h * k1 - ydiff;
                let cont = [
                    y,
                    ydiff,
                    bspl,
                    ydiff - h * k7 - bspl,
                    h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7),
                ];
                let step = Step { t0: t, h, y0: y, y1, cont };
                self.t = t + h;
                self.y = y1;
                self.k1 = k7;
                self.h = h * fac;
                self.steps += 1;
                return Ok(step);
            }
            h *= fac.min(1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerances = Tolerances { rtol: 1e-10, atol: 1e-10 };

    #[test]
    fn rotation_is_accurate() {
        let mut s = Stepper::new(|_, y| Complex64::i() * y, 0.0, Complex64::new(1.0, 0.0), TOL);
        let tend = 2.0 * std::f64::consts::PI;
        while s.t < tend {
            s.step(tend - s.t).unwrap();
        }
        assert!((s.y - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn dense_output_matches_solution() {
        let mut s = Stepper::new(|_, y| -y, 0.0, Complex64::new(1.0, 2.0), TOL);
        for _ in 0..20 {
            let st = s.step(f64::INFINITY).unwrap();
            for q in 0..=4 {
                let t = st.t0 + st.h * q as f64 / 4.0;
                let exact = Complex64::new(1.0, 2.0) * (-t).exp();
                assert!((st.at(t) - exact).norm() < 1e-8, "t = {t}");
            }
        }
    }

    #[test]
    fn stationary_point() {
        let mut s = Stepper::new(|_, _| Complex64::new(0.0, 0.0), 0.0, Complex64::new(-1.0, 0.0), TOL);
        while s.t < 10.0 {
            s.step(10.0 - s.t).unwrap();
        }
        assert_eq!(s.y, Complex64::new(-1.0, 0.0));
        assert!(s.steps < 20);
    }
}
