//! The stretched box `(D′ₜUₜ)⁻¹(Q)` of the free particle and the measured
//! phase-space extent of the evolved Gaussian.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gabor::OperatorHandle;
use crate::phase::PhaseGrid;
use crate::signal::{gaussian_window, GridSpec};
use crate::symplectic::free_particle_sigma;
use crate::tf::stft_visit;

/// Geometry of `{(x,ξ) : |x + ξ/σ| < ρ, |x − σξ| < ρ}`, `ρ = √(1+σ²)`,
/// and the measured extent of `|V_g U(t)g|`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxStretchRecord {
    pub t: f64,
    pub sigma: f64,
    pub rho: f64,
    /// Each row `(a, b)` is the strip `|a·x + b·ξ| < ρ`.
    pub strips: Vec<[f64; 2]>,
    /// Parallelogram vertices, counter-clockwise.
    pub vertices: Vec<[f64; 2]>,
    pub x_extent: f64,
    pub xi_extent: f64,
    /// `x_extent` over the half-width 1 of the unit box `Q`.
    pub stretch_vs_box: f64,
    /// `x_extent` over the same extent at `t = 0`.
    pub stretch_vs_t0: f64,
    /// Largest `|x|` with `|V_g U(t)g(x,ξ)| ≥ threshold·peak`.
    pub measured_x_extent: f64,
    pub threshold: f64,
    pub grid: GridSpec,
}

fn geometry(sigma: f64) -> (f64, Vec<[f64; 2]>) {
    let rho = (1.0 + sigma * sigma).sqrt();
    let mut vertices = Vec::with_capacity(4);
    // corner where x + ξ/σ = a and x − σξ = b
    for (a, b) in [(rho, rho), (rho, -rho), (-rho, -rho), (-rho, rho)] {
        let xi = sigma * (a - b) / (1.0 + sigma * sigma);
        vertices.push([a - xi / sigma, xi]);
    }
    (rho, vertices)
}

/// A grid wide enough for `U(t)g` down to far below `threshold`.
pub fn box_grid(t: f64) -> Result<GridSpec> {
    let mut half = 8.0;
    while half < 8.0 + 8.0 * t {
        half *= 2.0;
    }
    GridSpec::new(1, (16.0 * half) as usize, half)
}

pub fn box_stretch_demo(t: f64, threshold: f64) -> Result<BoxStretchRecord> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("t must be finite and nonnegative"));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid("threshold must lie in (0, 1)"));
    }
    let sigma = free_particle_sigma(t);
    let (rho, vertices) = geometry(sigma);
    let x_extent = vertices.iter().map(|v| v[0].abs()).fold(0.0, f64::max);
    let xi_extent = vertices.iter().map(|v| v[1].abs()).fold(0.0, f64::max);
    let (rho0, _) = geometry(1.0);

    let grid = box_grid(t)?;
    let g = gaussian_window(grid);
    let u = OperatorHandle::FreePropagator { t }.apply(&g)?;
    let lattice = PhaseGrid::signal_lattice_strided(&grid, 2, 2);
    let mut cells = Vec::with_capacity(lattice.len());
    stft_visit(&u, &g, &lattice, |_, z, v| cells.push((z[0], v.norm())))?;
    let peak = cells.iter().map(|c| c.1).fold(0.0, f64::max);
    let measured = cells.iter().filter(|c| c.1 >= threshold * peak).map(|c| c.0.abs()).fold(0.0, f64::max);

    Ok(BoxStretchRecord {
        t,
        sigma,
        rho,
        strips: vec![[1.0, 1.0 / sigma], [1.0, -sigma]],
        vertices,
        x_extent,
        xi_extent,
        stretch_vs_box: x_extent,
        stretch_vs_t0: x_extent / rho0,
        measured_x_extent: measured,
        threshold,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_satisfy_strips() {
        let rec = box_stretch_demo(1.0, 1e-3).unwrap();
        for v in &rec.vertices {
            for s in &rec.strips {
                assert!((s[0] * v[0] + s[1] * v[1]).abs() <= rec.rho * (1.0 + 1e-12));
            }
        }
        let zero = box_stretch_demo(0.0, 1e-3).unwrap();
        assert_eq!(zero.stretch_vs_t0, 1.0);
        assert!((zero.x_extent - 2f64.sqrt()).abs() < 1e-12);
    }
}
