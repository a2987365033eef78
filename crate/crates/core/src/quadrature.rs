//! Adaptive Gauss–Kronrod quadrature for the power-law integrals of the
//! convolution bounds.
//!
//! Integrands are nonnegative, peaked at a few known kinks and decay
//! algebraically, so the real line is cut at the kinks and at geometrically
//! growing shells before adaptive bisection.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// An integral estimate with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub value: f64,
    /// Estimated quadrature error (absolute).
    pub error: f64,
    /// Bound on the neglected tail (absolute), zero on finite intervals.
    pub truncation: f64,
    pub evaluations: usize,
}

impl Estimate {
    fn zero() -> Self {
        Estimate { value: 0.0, error: 0.0, truncation: 0.0, evaluations: 0 }
    }

    fn add(&mut self, other: Estimate) {
        self.value += other.value;
        self.error += other.error;
        self.truncation += other.truncation;
        self.evaluations += other.evaluations;
    }

    /// Total error relative to the value.
    pub fn relative_error(&self) -> f64 {
        (self.error + self.truncation) / self.value.abs()
    }
}

/// One 15-point Kronrod panel on `[a, b]` with the embedded 7-point Gauss
/// rule as error estimate.
pub fn gauss_kronrod(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection on `[a, b]` until every panel meets
/// `max(abs_tol, rel_tol·|panel|)` scaled by its share of the interval.
pub fn adaptive(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    const MAX_PANELS: usize = 200_000;
    let mut out = Estimate::zero();
    let mut stack = alloc::vec![(a, b, 0u32)];
    let width = b - a;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gauss_kronrod(f, lo, hi);
        out.evaluations += 15;
        let share = (hi - lo) / width;
        if e <= (abs_tol * share).max(rel_tol * v.abs()) || depth >= 60 {
            out.value += v;
            out.error += e;
            continue;
        }
        if out.evaluations > 15 * MAX_PANELS {
            return Err(Error::Quadrature(format!("no convergence on [{a}, {b}] after {MAX_PANELS} panels")));
        }
        let mid = 0.5 * (lo + hi);
        stack.push((mid, hi, depth + 1));
        stack.push((lo, mid, depth + 1));
    }
    Ok(out)
}

/// Cut points for `[−radius, radius]`: the kinks plus `±2ᵏ` shells.
pub fn shell_points(breakpoints: &[f64], radius: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|b| b.abs() < radius).collect();
    pts.push(-radius);
    pts.push(radius);
    pts.push(0.0);
    let mut r = 0.5;
    while r < radius {
        pts.push(r);
        pts.push(-r);
        for b in breakpoints {
            for p in [b + r, b - r] {
                if p.abs() < radius {
                    pts.push(p);
                }
            }
        }
        r *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    pts
}

/// `∫_{−radius}^{radius} f` with cuts at the breakpoints and on shells.
pub fn integrate_line(
    f: &mut impl FnMut(f64) -> f64,
    breakpoints: &[f64],
    radius: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid("integration radius must be positive and finite"));
    }
    let pts = shell_points(breakpoints, radius);
    // coarse pass to fix an absolute tolerance for the thin outer panels
    let mut scale = 0.0;
    for w in pts.windows(2) {
        scale += gauss_kronrod(f, w[0], w[1]).0.abs();
    }
    let abs_tol = rel_tol * scale;
    let mut out = Estimate::zero();
    let len = 2.0 * radius;
    for w in pts.windows(2) {
        out.add(adaptive(f, w[0], w[1], abs_tol * (w[1] - w[0]) / len, rel_tol)?);
    }
    Ok(out)
}

/// `∬_{[−R,R]²} f(u₁, u₂)` as an iterated integral, each direction cut at
/// its breakpoints.
pub fn integrate_square(
    f: &mut impl FnMut(f64, f64) -> f64,
    breaks_inner: &[f64],
    breaks_outer: &[f64],
    radius: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    let mut inner_error = 0.0;
    let mut evaluations = 0;
    let mut failure = None;
    let mut outer = |u2: f64| match integrate_line(&mut |u1| f(u1, u2), breaks_inner, radius, rel_tol) {
        Ok(e) => {
            inner_error = f64::max(inner_error, e.error / (e.value.abs() + f64::MIN_POSITIVE));
            evaluations += e.evaluations;
            e.value
        }
        Err(e) => {
            failure = Some(e);
            0.0
        }
    };
    let mut est = integrate_line(&mut outer, breaks_outer, radius, rel_tol)?;
    if let Some(e) = failure {
        return Err(e);
    }
    est.error += inner_error * est.value.abs();
    est.evaluations = evaluations;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn kronrod_is_exact_for_polynomials() {
        let (v, e) = gauss_kronrod(&mut |x| x.powi(10) - 3.0 * x * x, -1.0, 2.0);
        let exact = (2f64.powi(11) + 1.0) / 11.0 - 9.0;
        assert!((v - exact).abs() < 1e-12 * exact.abs());
        assert!(e < 1e-8);
    }

    #[test]
    fn power_law_line_integral() {
        // ∫(1+|u|)^{-4} = 2/3
        let est = integrate_line(&mut |u| (1.0 + u.abs()).powi(-4), &[], 1e6, 1e-12).unwrap();
        let tail = 2.0 * (1.0 + 1e6f64).powi(-3) / 3.0;
        assert!((est.value + tail - 2.0 / 3.0).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn kinked_integrand() {
        let est = integrate_line(&mut |u| (-(u - 3.0).abs()).exp(), &[3.0], 60.0, 1e-12).unwrap();
        assert!((est.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn iterated_gaussian() {
        let est = integrate_square(&mut |a, b| (-PI * (a * a + b * b)).exp(), &[], &[], 8.0, 1e-11).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
    }
}
