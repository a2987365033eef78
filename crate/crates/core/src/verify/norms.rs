//! Growth of modulation-space norms under metaplectic operators.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metaplectic::MetaplecticOperator;
use crate::signal::{gaussian_window, DiscreteSignal, GridSpec};
use crate::symplectic::SymplecticMatrix;
use crate::tf::modulation_norm;

/// `‖μ(S)f‖_{Mᵖ}/‖f‖_{Mᵖ}` over a battery, against `(det Σ)^{|1/2−1/p|}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormGrowthReport {
    pub operator: String,
    pub p: f64,
    pub det_sigma: f64,
    /// `(det Σ)^{|1/2−1/p|}`.
    pub factor: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// `max_ratio / factor`.
    pub normalized: f64,
}

/// Gaussian, shifted packet, first Hermite function and a two-packet sum.
pub fn default_battery(grid: GridSpec) -> Result<Vec<(String, DiscreteSignal)>> {
    let g = gaussian_window(grid);
    let d = grid.d;
    let hermite = g.map(|y, v| v * Complex64::new(y[0], 0.0));
    let a = g.tf_shift(&vec![-1.0; d], &vec![0.0; d], true)?;
    let b = g.tf_shift(&vec![1.0; d], &vec![1.0; d], true)?;
    Ok(vec![
        (String::from("gaussian"), g.clone()),
        (String::from("packet"), g.tf_shift(&vec![1.0; d], &vec![0.5; d], true)?),
        (String::from("hermite1"), hermite),
        (String::from("two-packets"), a.add(&b)?),
    ])
}

/// Evaluates the growth ratio of `μ(S)` in `Mᵖ`, `p ∈ {1, 2, ∞}`, with the
/// Gaussian window of the battery grid.
pub fn norm_growth_check(s: &SymplecticMatrix, battery: &[DiscreteSignal], p: f64) -> Result<NormGrowthReport> {
    if !(p == 1.0 || p == 2.0 || p.is_infinite()) {
        return Err(Error::invalid("p must be 1, 2 or ∞"));
    }
    let first = battery.first().ok_or_else(|| Error::invalid("empty battery"))?;
    let g = gaussian_window(*first.grid());
    let op = MetaplecticOperator::new(s.clone())?;
    let mut ratios = Vec::with_capacity(battery.len());
    for f in battery {
        let before = modulation_norm(f, &g, p, 0.0)?;
        let after = modulation_norm(&op.apply(f)?, &g, p, 0.0)?;
        ratios.push(after / before);
    }
    let det = op.decomposition().det_sigma();
    let exponent = (0.5 - 1.0 / p).abs();
    let factor = det.powf(exponent);
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(NormGrowthReport {
        operator: format!("{:?}", s.matrix().as_slice()),
        p,
        det_sigma: det,
        factor,
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio,
        normalized: max_ratio / factor,
        ratios,
    })
}
