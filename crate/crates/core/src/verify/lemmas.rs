//! Numerical checks of the weighted convolution inequalities behind the
//! refined envelope.
//!
//! Each check integrates the left-hand side by adaptive quadrature on a box
//! large enough that the analytic tail bound stays below `1e−8` of the value,
//! and divides by the claimed right-hand side.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::quadrature::{integrate_line, integrate_square, Estimate};

/// Tail budget relative to the value.
const TAIL_FRACTION: f64 = 1e-8;
const REL_TOL: f64 = 1e-10;

/// Which inequality a report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LemmaKind {
    /// `∫(a+|σ⁻¹u+v|)^{−s}(b+|u|)^{−s}du ≲ (a+|v|)^{−s}b^{1−s} + a^{1−s}(b+|v|)^{1−s}`.
    ShiftedDilated,
    /// `∫(a+|u−v|)^{−s}(b+σ⁻¹|u|)^{−s}du ≲ (a+σ⁻¹|v|)^{1−s}b^{1−s} + a^{1−s}(b+σ⁻¹|v|)^{−s}`.
    DilatedWeight,
    /// `∫(a+|u−v|)^{−s}(a+|u|)^{−s}du ≲ a^{d−s}(a+|v|)^{−s}` on ℝ.
    Isotropic,
    /// `∫_{ℝ²ᵈ}(1+|v−D″u|)^{−s}(1+|D′u|)^{−s}du ≲ (1+|D′v|)^{2d−s}`.
    Planar,
}

/// Left side, right side and their ratio for one parameter tuple.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LemmaReport {
    pub kind: LemmaKind,
    pub a: f64,
    pub b: f64,
    pub sigma: Vec<f64>,
    pub v: Vec<f64>,
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Estimated quadrature error relative to `lhs`.
    pub quadrature_error: f64,
    /// Tail bound relative to `lhs`.
    pub truncation_error: f64,
    /// Half side of the integration box.
    pub radius: f64,
    pub evaluations: usize,
}

/// All reports of one sweep and the single constant bounding their ratios.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LemmaSweep {
    pub kind: LemmaKind,
    pub s: f64,
    pub reports: Vec<LemmaReport>,
    pub max_ratio: f64,
    /// Analytic constant from the splitting argument, when one is known.
    pub analytic_constant: Option<f64>,
    pub max_truncation_error: f64,
    pub max_quadrature_error: f64,
}

impl LemmaSweep {
    fn new(kind: LemmaKind, s: f64, reports: Vec<LemmaReport>, analytic_constant: Option<f64>) -> Self {
        let fold = |f: fn(&LemmaReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
        LemmaSweep {
            kind,
            s,
            max_ratio: fold(|r| r.ratio),
            max_truncation_error: fold(|r| r.truncation_error),
            max_quadrature_error: fold(|r| r.quadrature_error),
            analytic_constant,
            reports,
        }
    }

    /// Every ratio finite, within the analytic constant if there is one, and
    /// every integral resolved to `tol` relative.
    pub fn passes(&self, tol: f64) -> bool {
        self.max_ratio.is_finite()
            && self.reports.iter().all(|r| r.ratio > 0.0)
            && self.analytic_constant.is_none_or(|c| self.max_ratio <= c)
            && self.max_truncation_error <= tol
            && self.max_quadrature_error <= tol
    }
}

/// Smallest power of two `R ≥ start` with `tail(R) ≤ budget`.
fn radius_for(start: f64, budget: f64, tail: impl Fn(f64) -> f64) -> Result<f64> {
    let mut r = 1.0;
    while r < start {
        r *= 2.0;
    }
    while tail(r) > budget {
        r *= 2.0;
        if r > 1e15 {
            return Err(Error::Quadrature("tail bound does not reach the budget".into()));
        }
    }
    Ok(r)
}

/// Integrates a positive line integrand to within the tail budget.
fn line_integral(
    f: &mut impl FnMut(f64) -> f64,
    breaks: &[f64],
    start: f64,
    tail: impl Fn(f64) -> f64,
) -> Result<(Estimate, f64)> {
    // any sub-box integral bounds the full one from below
    let lower = integrate_line(f, breaks, start, 1e-6)?.value;
    let r = radius_for(start, TAIL_FRACTION * lower, &tail)?;
    let mut est = integrate_line(f, breaks, r, REL_TOL)?;
    est.truncation = tail(r);
    Ok((est, r))
}

fn check_line_params(a: f64, b: f64, sigma: f64, s: f64) -> Result<()> {
    if !(s > 1.0) || !(a >= 1.0) || !(b >= 1.0) || !(sigma >= 1.0) {
        return Err(Error::invalid("need s > 1 and a, b, σ ≥ 1"));
    }
    Ok(())
}

fn report(
    kind: LemmaKind,
    (a, b, s): (f64, f64, f64),
    sigma: Vec<f64>,
    v: Vec<f64>,
    est: Estimate,
    radius: f64,
    rhs: f64,
) -> LemmaReport {
    LemmaReport {
        kind,
        a,
        b,
        sigma,
        v,
        s,
        lhs: est.value,
        rhs,
        ratio: est.value / rhs,
        quadrature_error: est.error / est.value,
        truncation_error: est.truncation / est.value,
        radius,
        evaluations: est.evaluations,
    }
}

/// One of the two line inequalities, with `σ` acting on the first factor
/// (`ShiftedDilated`) or on the weight (`DilatedWeight`).
pub fn convolution_bound_check(kind: LemmaKind, a: f64, b: f64, sigma: f64, v: f64, s: f64) -> Result<LemmaReport> {
    check_line_params(a, b, sigma, s)?;
    let far = 2.0 * (2.0 * sigma).powf(s) / (2.0 * s - 1.0);
    let (est, r, rhs) = match kind {
        LemmaKind::ShiftedDilated => {
            let start = 4.0 * sigma * (v.abs() + 1.0);
            let tail = |r: f64| {
                let weight_only = 2.0 * a.powf(-s) * (b + r).powf(1.0 - s) / (s - 1.0);
                weight_only.min(far * r.powf(1.0 - 2.0 * s))
            };
            let mut f = |u: f64| (a + (u / sigma + v).abs()).powf(-s) * (b + u.abs()).powf(-s);
            let (est, r) = line_integral(&mut f, &[0.0, -sigma * v], start, tail)?;
            let rhs = (a + v.abs()).powf(-s) * b.powf(1.0 - s) + a.powf(1.0 - s) * (b + v.abs()).powf(1.0 - s);
            (est, r, rhs)
        }
        LemmaKind::DilatedWeight => {
            let start = 4.0 * sigma * (v.abs() + 1.0);
            let tail = |r: f64| {
                let weight_only = 4.0 * b.powf(-s) * (a + r / 2.0).powf(1.0 - s) / (s - 1.0);
                weight_only.min(far * r.powf(1.0 - 2.0 * s))
            };
            let mut f = |u: f64| (a + (u - v).abs()).powf(-s) * (b + u.abs() / sigma).powf(-s);
            let (est, r) = line_integral(&mut f, &[0.0, v], start, tail)?;
            let w = v.abs() / sigma;
            let rhs = (a + w).powf(1.0 - s) * b.powf(1.0 - s) + a.powf(1.0 - s) * (b + w).powf(-s);
            (est, r, rhs)
        }
        _ => return Err(Error::invalid("not a line inequality")),
    };
    Ok(report(kind, (a, b, s), vec![sigma], vec![v], est, r, rhs))
}

/// The sharper isotropic bound `∫(a+|u−v|)^{−s}(a+|u|)^{−s} ≲ a^{1−s}(a+|v|)^{−s}`
/// on the line.
pub fn isotropic_convolution_check(a: f64, v: f64, s: f64) -> Result<LemmaReport> {
    check_line_params(a, a, 1.0, s)?;
    let far = 2.0 * 2f64.powf(s) / (2.0 * s - 1.0);
    let tail = |r: f64| {
        let weight_only = 4.0 * a.powf(-s) * (a + r / 2.0).powf(1.0 - s) / (s - 1.0);
        weight_only.min(far * r.powf(1.0 - 2.0 * s))
    };
    let mut f = |u: f64| (a + (u - v).abs()).powf(-s) * (a + u.abs()).powf(-s);
    let (est, r) = line_integral(&mut f, &[0.0, v], 4.0 * (v.abs() + 1.0), tail)?;
    let rhs = a.powf(1.0 - s) * (a + v.abs()).powf(-s);
    Ok(report(LemmaKind::Isotropic, (a, a, s), vec![1.0], vec![v], est, r, rhs))
}

/// `∫_{ℝ²}(1+|v−D″u|)^{−s}(1+|D′u|)^{−s}du` against `(1+|D′v|)^{2−s}` for
/// `d = 1`, `D′ = diag(σ⁻¹, 1)`, `D″ = diag(1, σ⁻¹)`.
pub fn planar_convolution_check(sigma: &[f64], v: &[f64], s: f64) -> Result<LemmaReport> {
    if sigma.len() != 1 || v.len() != 2 {
        return Err(Error::Precondition("the planar quadrature is implemented for d = 1 only".into()));
    }
    let sg = sigma[0];
    if !(sg >= 1.0) || !(s > 2.0) {
        return Err(Error::invalid("need σ ≥ 1 and s > 2d"));
    }
    let (v1, v2) = (v[0], v[1]);
    let mut f = |u1: f64, u2: f64| {
        let p = 1.0 + ((v1 - u1).powi(2) + (v2 - u2 / sg).powi(2)).sqrt();
        let q = 1.0 + ((u1 / sg).powi(2) + u2 * u2).sqrt();
        (p * q).powf(-s)
    };
    let far = (2.0 * sg * sg).powf(s) * 2.0 * PI / (2.0 * s - 2.0);
    let tail = |r: f64| far * r.powf(2.0 - 2.0 * s);
    let start = 4.0 * sg * (norm(v) + 1.0);
    let breaks_inner = [0.0, v1];
    let breaks_outer = [0.0, sg * v2];
    let lower = integrate_square(&mut f, &breaks_inner, &breaks_outer, start, 1e-5)?.value;
    let r = radius_for(start, TAIL_FRACTION * lower, tail)?;
    let mut est = integrate_square(&mut f, &breaks_inner, &breaks_outer, r, 1e-9)?;
    est.truncation = tail(r);
    let dv = norm(&[v1 / sg, v2]);
    let rhs = (1.0 + dv).powf(2.0 - s);
    Ok(report(LemmaKind::Planar, (1.0, 1.0, s), sigma.to_vec(), v.to_vec(), est, r, rhs))
}

/// `2^{s+1}/(s−1)` for the line inequalities, `2^{s+2}/(s−1)` for the
/// isotropic one: the constants of the two-region splitting argument.
pub fn analytic_constant(kind: LemmaKind, s: f64) -> Option<f64> {
    match kind {
        LemmaKind::ShiftedDilated | LemmaKind::DilatedWeight => Some(2f64.powf(s + 1.0) / (s - 1.0)),
        LemmaKind::Isotropic => Some(2f64.powf(s + 2.0) / (s - 1.0)),
        LemmaKind::Planar => None,
    }
}

/// Parameter grid of the line sweeps.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineGrid {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub sigma: Vec<f64>,
    pub v: Vec<f64>,
}

impl Default for LineGrid {
    fn default() -> Self {
        LineGrid {
            a: vec![1.0, 2.0, 4.0],
            b: vec![1.0, 2.0, 4.0],
            sigma: vec![1.0, 4.0, 16.0],
            v: vec![0.0, 1.0, -1.0, 8.0, -8.0],
        }
    }
}

/// Parameter grid of the planar sweep; `v` runs over `radii` times each
/// unit vector in `directions`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanarGrid {
    pub sigma: Vec<f64>,
    pub radii: Vec<f64>,
    pub directions: Vec<[f64; 2]>,
}

impl Default for PlanarGrid {
    fn default() -> Self {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        PlanarGrid {
            sigma: vec![1.0, 2.0, 8.0],
            radii: vec![0.0, 1.0, 4.0, 16.0],
            directions: vec![[1.0, 0.0], [0.0, 1.0], [r, r], [r, -r]],
        }
    }
}

/// Parameter tuples of a line sweep in report order.
pub fn line_tuples(kind: LemmaKind, grid: &LineGrid) -> Vec<(f64, f64, f64, f64)> {
    let mut out = Vec::new();
    for &a in &grid.a {
        match kind {
            LemmaKind::Isotropic => {
                for &v in &grid.v {
                    out.push((a, a, 1.0, v));
                }
            }
            _ => {
                for &b in &grid.b {
                    for &sg in &grid.sigma {
                        for &v in &grid.v {
                            out.push((a, b, sg, v));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Runs one line tuple.
pub fn line_check(kind: LemmaKind, (a, b, sigma, v): (f64, f64, f64, f64), s: f64) -> Result<LemmaReport> {
    match kind {
        LemmaKind::Isotropic => isotropic_convolution_check(a, v, s),
        _ => convolution_bound_check(kind, a, b, sigma, v, s),
    }
}

/// Sweeps a line inequality over `grid`.
pub fn line_sweep(kind: LemmaKind, grid: &LineGrid, s: f64) -> Result<LemmaSweep> {
    let reports = line_tuples(kind, grid).into_iter().map(|t| line_check(kind, t, s)).collect::<Result<_>>()?;
    Ok(assemble(kind, s, reports))
}

/// Collects finished reports into a sweep.
pub fn assemble(kind: LemmaKind, s: f64, reports: Vec<LemmaReport>) -> LemmaSweep {
    LemmaSweep::new(kind, s, reports, analytic_constant(kind, s))
}

/// Points `(σ, v)` of a planar sweep in report order; `v = 0` appears once.
pub fn planar_tuples(grid: &PlanarGrid) -> Vec<(f64, [f64; 2])> {
    let mut out = Vec::new();
    for &sg in &grid.sigma {
        for &r in &grid.radii {
            if r == 0.0 {
                out.push((sg, [0.0, 0.0]));
                continue;
            }
            for dir in &grid.directions {
                out.push((sg, [r * dir[0], r * dir[1]]));
            }
        }
    }
    out
}

pub fn planar_sweep(grid: &PlanarGrid, s: f64) -> Result<LemmaSweep> {
    let reports =
        planar_tuples(grid).into_iter().map(|(sg, v)| planar_convolution_check(&[sg], &v, s)).collect::<Result<_>>()?;
    Ok(assemble(LemmaKind::Planar, s, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_case() {
        let r = convolution_bound_check(LemmaKind::ShiftedDilated, 1.0, 1.0, 1.0, 0.0, 2.0).unwrap();
        assert!((r.lhs - 2.0 / 3.0).abs() < 1e-9, "{}", r.lhs);
        assert!((r.rhs - 2.0).abs() < 1e-15);
        assert!(r.truncation_error <= 1e-6 && r.quadrature_error <= 1e-6);
    }

    #[test]
    fn symmetric_in_v() {
        for kind in [LemmaKind::ShiftedDilated, LemmaKind::DilatedWeight] {
            let p = convolution_bound_check(kind, 2.0, 1.0, 4.0, 8.0, 1.5).unwrap();
            let m = convolution_bound_check(kind, 2.0, 1.0, 4.0, -8.0, 1.5).unwrap();
            assert!((p.lhs - m.lhs).abs() < 1e-8 * p.lhs);
        }
        let p = isotropic_convolution_check(2.0, 1.0, 3.0).unwrap();
        let m = isotropic_convolution_check(2.0, -1.0, 3.0).unwrap();
        assert!((p.lhs - m.lhs).abs() < 1e-8 * p.lhs);
    }

    #[test]
    fn isotropic_closed_form_at_origin() {
        // ∫(1+|u|)^{-2s} = 2/(2s−1)
        let r = isotropic_convolution_check(1.0, 0.0, 3.0).unwrap();
        assert!((r.lhs - 0.4).abs() < 1e-9);
    }

    #[test]
    fn planar_equal_weights() {
        // σ = 1, v = 0: 2π∫(1+r)^{-2s} r dr = 2π/((2s−1)(2s−2))
        let r = planar_convolution_check(&[1.0], &[0.0, 0.0], 3.0).unwrap();
        let exact = 2.0 * PI / 20.0;
        assert!((r.lhs - exact).abs() < 1e-7 * exact, "{} vs {exact}", r.lhs);
        assert!(r.ratio.is_finite());
        assert!(planar_convolution_check(&[1.0, 1.0], &[0.0; 4], 5.0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(convolution_bound_check(LemmaKind::ShiftedDilated, 0.5, 1.0, 1.0, 0.0, 2.0).is_err());
        assert!(convolution_bound_check(LemmaKind::ShiftedDilated, 1.0, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(convolution_bound_check(LemmaKind::Planar, 1.0, 1.0, 1.0, 0.0, 3.0).is_err());
    }
}
