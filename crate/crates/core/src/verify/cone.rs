//! Propagation of cone-restricted phase-space regularity.
//!
//! The image cone `S(Γ′)` is handled through the preimage test
//! `w ∈ S(Γ′) ⇔ S⁻¹w ∈ Γ′`, so no boundary rays need to be traced.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::metaplectic::MetaplecticOperator;
use crate::phase::{ConeSpec, PhaseGrid};
use crate::signal::DiscreteSignal;
use crate::symplectic::SymplecticMatrix;
use crate::tf::{cone_norm_on, modulation_norm_on, weighted_norm};

/// Both sides of the cone propagation bound for one operator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConeReport {
    pub operator: String,
    pub gamma: ConeSpec,
    pub gamma_prime: ConeSpec,
    pub r: f64,
    pub sigma: Vec<f64>,
    pub det_sigma: f64,
    /// `‖μ(S)f‖_{M¹_{(γ)}(S(Γ′))}`.
    pub lhs: f64,
    /// `‖f‖_{M¹_{(g)}(Γ)}`.
    pub rhs_cone: f64,
    /// `‖f‖_{M¹_{v_{−r}}}`.
    pub rhs_residual: f64,
    /// `(det Σ)^{1/2}(rhs_cone + (det Σ)^r rhs_residual)`.
    pub bracket: f64,
    pub ratio: f64,
    pub lhs_points: usize,
    pub rhs_points: usize,
}

/// Evaluates the cone propagation bound for `μ(S)` on the signal lattice of
/// `f`. `Γ′` widened by `margin` radians must sit inside `Γ`.
#[allow(clippy::too_many_arguments)]
pub fn cone_propagation_check(
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    gamma_window: &DiscreteSignal,
    s: &SymplecticMatrix,
    cone: &ConeSpec,
    inner: &ConeSpec,
    r: f64,
    margin: f64,
) -> Result<ConeReport> {
    let d = f.grid().d;
    if s.dim() != d || cone.dim() != d || inner.dim() != d {
        return Err(Error::dim("operator, cones and signal must share the dimension"));
    }
    if !inner.is_nested_in(cone, margin) {
        return Err(Error::Precondition(format!("inner cone is not nested in the outer cone with margin {margin}")));
    }
    if !(r >= 0.0) {
        return Err(Error::invalid("r must be nonnegative"));
    }
    let op = MetaplecticOperator::new(s.clone())?;
    let dec = op.decomposition().clone();
    let out = op.apply(f)?;
    let lattice = PhaseGrid::signal_lattice(f.grid());
    let s_inv = s.inverse();
    let lhs = weighted_norm(&out, gamma_window, &lattice, 1.0, 0.0, |w| inner.contains(&s_inv.apply(w)))?;
    let rhs = cone_norm_on(f, g, cone, 1.0, &lattice)?;
    let residual = modulation_norm_on(f, g, 1.0, -r, &lattice)?;
    let det = dec.det_sigma();
    let bracket = det.sqrt() * (rhs.value + det.powf(r) * residual);
    Ok(ConeReport {
        operator: format!("{:?}", s.matrix().as_slice()),
        gamma: cone.clone(),
        gamma_prime: inner.clone(),
        r,
        sigma: dec.sigma().to_vec(),
        det_sigma: det,
        lhs: lhs.value,
        rhs_cone: rhs.value,
        rhs_residual: residual,
        bracket,
        ratio: lhs.value / bracket,
        lhs_points: lhs.points,
        rhs_points: rhs.points,
    })
}

/// Ratios of a sweep and the bound they are held to.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConeSweep {
    pub labels: Vec<String>,
    pub reports: Vec<ConeReport>,
    pub max_ratio: f64,
    pub bound: f64,
}

impl ConeSweep {
    pub fn new(labels: Vec<String>, reports: Vec<ConeReport>, bound: f64) -> Self {
        let max_ratio = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
        ConeSweep { labels, reports, max_ratio, bound }
    }

    pub fn passes(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(|r| r.ratio.is_finite()) && self.max_ratio <= self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gaussian_window, GridSpec};
    use crate::symplectic::free_particle_flow;
    use core::f64::consts::PI;

    fn setup() -> (DiscreteSignal, ConeSpec, ConeSpec) {
        let g = gaussian_window(GridSpec::new(1, 512, 16.0).unwrap());
        let h = g.grid().h();
        let outer = ConeSpec::around_axis(1, 0, PI / 6.0, h).unwrap();
        let inner = ConeSpec::around_axis(1, 0, PI / 12.0, h).unwrap();
        (g, outer, inner)
    }

    #[test]
    fn identity_is_window_change() {
        let (g, outer, inner) = setup();
        let f = g.tf_shift(&[2.0], &[0.25], false).unwrap();
        let rep = cone_propagation_check(&f, &g, &g, &SymplecticMatrix::identity(1), &outer, &inner, 1.0, 0.01)
            .unwrap();
        assert!(rep.lhs <= rep.rhs_cone * (1.0 + 1e-8));
        assert_eq!(rep.det_sigma, 1.0);
    }

    #[test]
    fn nesting_is_enforced() {
        let (g, outer, inner) = setup();
        let s = free_particle_flow(1.0, 1);
        assert!(matches!(
            cone_propagation_check(&g, &g, &g, &s, &inner, &outer, 1.0, 0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn packet_outside_cone_leaves_residual_term() {
        let (g, outer, inner) = setup();
        let f = g.tf_shift(&[0.0], &[5.0], false).unwrap();
        let s = free_particle_flow(1.0, 1);
        let rep = cone_propagation_check(&f, &g, &g, &s, &outer, &inner, 1.0, 0.01).unwrap();
        assert!(rep.rhs_cone < 1e-12 * rep.rhs_residual, "{rep:?}");
        assert!(rep.ratio.is_finite() && rep.ratio < 1.0);
    }
}
