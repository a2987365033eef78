//! Dispersive decay of the free propagator seen through its Gabor matrix.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gabor::{gabor_matrix_visit, tracking_lattice, OperatorHandle};
use crate::phase::{Axis, PhaseGrid};
use crate::signal::DiscreteSignal;
use crate::symplectic::free_particle_flow;

/// `sup |K|` per `t` and the least-squares line through
/// `(log(1+t), log sup|K|)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlopeReport {
    pub ts: Vec<f64>,
    pub sups: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log units.
    pub residual: f64,
    pub non_increasing: bool,
}

impl SlopeReport {
    pub fn slope_within(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

/// `sup_{z, w} |⟨U(t)π(z)g, π(w)g⟩|` with the targets `w` on `offsets`
/// moved to `S_t z`.
pub fn dispersion_sup(t: f64, g: &DiscreteSignal, zs: &PhaseGrid, offsets: &[Axis]) -> Result<f64> {
    let d = g.grid().d;
    let flow = free_particle_flow(t, d);
    let mut sup: f64 = 0.0;
    gabor_matrix_visit(
        &OperatorHandle::FreePropagator { t },
        g,
        g,
        zs,
        |z| tracking_lattice(&flow.apply(z), offsets),
        |_, _, _, v| sup = sup.max(v.norm()),
    )?;
    Ok(sup)
}

/// Least-squares fit of `log sups` against `log(1+t)`.
pub fn fit_slope(ts: &[f64], sups: &[f64]) -> Result<SlopeReport> {
    if ts.len() != sups.len() || ts.len() < 2 {
        return Err(Error::DegenerateFit("need at least two (t, sup) pairs".into()));
    }
    if ts.iter().any(|t| !(*t > 0.0)) || ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateFit("t values must be positive and increasing".into()));
    }
    if sups.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::DegenerateFit("sup values must be positive and finite".into()));
    }
    let xs: Vec<f64> = ts.iter().map(|t| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("t values do not spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SlopeReport {
        ts: ts.to_vec(),
        sups: sups.to_vec(),
        slope,
        intercept,
        residual,
        non_increasing: sups.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
    })
}

/// Measures `sup|K|` for each `t` and fits the decay exponent. The `t`
/// values must span at least 1.5 decades.
pub fn dispersive_slope(ts: &[f64], g: &DiscreteSignal, zs: &PhaseGrid, offsets: &[Axis]) -> Result<SlopeReport> {
    check_span(ts)?;
    let sups = ts.iter().map(|&t| dispersion_sup(t, g, zs, offsets)).collect::<Result<Vec<_>>>()?;
    fit_slope(ts, &sups)
}

pub fn check_span(ts: &[f64]) -> Result<()> {
    match (ts.first(), ts.last()) {
        (Some(&a), Some(&b)) if a > 0.0 && (b / a).log10() >= 1.5 => Ok(()),
        _ => Err(Error::DegenerateFit("t values must be positive and span at least 1.5 decades".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gaussian_window, GridSpec};

    #[test]
    fn fit_recovers_power_law() {
        let ts = [1.0, 3.0, 10.0, 40.0];
        let sups: Vec<f64> = ts.iter().map(|t: &f64| 0.7 * (1.0 + t).powf(-0.5)).collect();
        let r = fit_slope(&ts, &sups).unwrap();
        assert!((r.slope + 0.5).abs() < 1e-12 && r.residual < 1e-12 && r.non_increasing);
        assert!(fit_slope(&[1.0], &[1.0]).is_err());
        assert!(check_span(&[1.0, 10.0]).is_err());
    }

    #[test]
    fn small_t_recovers_window_norm() {
        let g = gaussian_window(GridSpec::new(1, 256, 8.0).unwrap());
        let zs = PhaseGrid::single(&[0.0, 0.0]).unwrap();
        let offsets = [Axis::centered(0.0, 0.25, 4), Axis::centered(0.0, 0.25, 4)];
        let m = dispersion_sup(1e-6, &g, &zs, &offsets).unwrap();
        assert!((m - 2f64.powf(-0.5)).abs() < 1e-8);
    }
}
