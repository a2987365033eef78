//! Gabor matrices `K_A(w, z) = ⟨Aπ(z)g, π(w)γ⟩` of operators on signals.
//!
//! Each source point `z` costs one operator application and one STFT of the
//! result against `γ` over the requested `w` points.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metaplectic::{free_propagator, MetaplecticOperator};
use crate::phase::{Axis, PhaseField, PhaseGrid};
use crate::signal::DiscreteSignal;
use crate::symplectic::{free_particle_flow, SymplecticMatrix};
use crate::tf::{stft, stft_visit};
use crate::weyl::{weyl_apply, WeylSymbol};

/// An operator whose Gabor matrix can be sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorHandle {
    Identity,
    Metaplectic(MetaplecticOperator),
    /// `ℱ⁻¹e^{−2πit|ξ|²}ℱ`, applied periodically on the signal grid.
    FreePropagator { t: f64 },
    /// `aʷμ(S)`.
    Generalized { symbol: WeylSymbol, op: MetaplecticOperator },
    /// `A₁A₂⋯A_k`; the last factor acts first.
    Compose(Vec<OperatorHandle>),
}

impl OperatorHandle {
    pub fn metaplectic(s: SymplecticMatrix) -> Result<Self> {
        Ok(OperatorHandle::Metaplectic(MetaplecticOperator::new(s)?))
    }

    pub fn apply(&self, f: &DiscreteSignal) -> Result<DiscreteSignal> {
        match self {
            OperatorHandle::Identity => Ok(f.clone()),
            OperatorHandle::Metaplectic(op) => op.apply(f),
            OperatorHandle::FreePropagator { t } => Ok(free_propagator(*t, f)),
            OperatorHandle::Generalized { symbol, op } => weyl_apply(symbol, &op.apply(f)?),
            OperatorHandle::Compose(parts) => {
                let mut out = f.clone();
                for p in parts.iter().rev() {
                    out = p.apply(&out)?;
                }
                Ok(out)
            }
        }
    }

    /// The canonical transformation `S` near whose graph `w = Sz` the Gabor
    /// matrix concentrates.
    pub fn canonical_map(&self, d: usize) -> Result<SymplecticMatrix> {
        match self {
            OperatorHandle::Identity => Ok(SymplecticMatrix::identity(d)),
            OperatorHandle::Metaplectic(op) | OperatorHandle::Generalized { op, .. } => {
                if op.symplectic().dim() != d {
                    return Err(Error::dim("operator dimension differs"));
                }
                Ok(op.symplectic().clone())
            }
            OperatorHandle::FreePropagator { t } => Ok(free_particle_flow(*t, d)),
            OperatorHandle::Compose(parts) => {
                let mut s = SymplecticMatrix::identity(d);
                for p in parts {
                    s = s.compose(&p.canonical_map(d)?)?;
                }
                Ok(s)
            }
        }
    }

    /// Inverse of a unitary operator (up to the usual constant).
    pub fn inverse(&self) -> Result<Self> {
        Ok(match self {
            OperatorHandle::Identity => OperatorHandle::Identity,
            OperatorHandle::Metaplectic(op) => OperatorHandle::Metaplectic(op.inverse()?),
            OperatorHandle::FreePropagator { t } => OperatorHandle::FreePropagator { t: -t },
            OperatorHandle::Generalized { .. } => {
                return Err(Error::invalid("generalized metaplectic operators are not inverted"))
            }
            OperatorHandle::Compose(parts) => {
                OperatorHandle::Compose(parts.iter().rev().map(|p| p.inverse()).collect::<Result<_>>()?)
            }
        })
    }

    pub fn is_unitary(&self) -> bool {
        match self {
            OperatorHandle::Generalized { .. } => false,
            OperatorHandle::Compose(parts) => parts.iter().all(|p| p.is_unitary()),
            _ => true,
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            OperatorHandle::Identity => String::from("identity"),
            OperatorHandle::Metaplectic(op) => format!("metaplectic {:?}", op.symplectic().matrix().as_slice()),
            OperatorHandle::FreePropagator { t } => format!("free propagator t={t}"),
            OperatorHandle::Generalized { op, .. } => {
                format!("generalized metaplectic {:?}", op.symplectic().matrix().as_slice())
            }
            OperatorHandle::Compose(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| p.describe()).collect();
                format!("compose[{}]", inner.join(", "))
            }
        }
    }
}

/// The composite `f ↦ aʷ(μ(S)f)`.
pub fn generalized_metaplectic(a: WeylSymbol, s: SymplecticMatrix) -> Result<OperatorHandle> {
    a.validate(s.dim())?;
    Ok(OperatorHandle::Generalized { symbol: a, op: MetaplecticOperator::new(s)? })
}

/// Sampled Gabor-matrix entries, ordered by source point and then by target.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaborMatrixSamples {
    pub operator: String,
    d: usize,
    w: Vec<f64>,
    z: Vec<f64>,
    values: Vec<Complex64>,
}

impl GaborMatrixSamples {
    pub fn empty(operator: String, d: usize) -> Self {
        GaborMatrixSamples { operator, d, w: Vec::new(), z: Vec::new(), values: Vec::new() }
    }

    pub fn push(&mut self, w: &[f64], z: &[f64], value: Complex64) {
        debug_assert!(w.len() == 2 * self.d && z.len() == 2 * self.d);
        self.w.extend_from_slice(w);
        self.z.extend_from_slice(z);
        self.values.push(value);
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn w(&self, i: usize) -> &[f64] {
        &self.w[2 * self.d * i..2 * self.d * (i + 1)]
    }

    pub fn z(&self, i: usize) -> &[f64] {
        &self.z[2 * self.d * i..2 * self.d * (i + 1)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], &[f64], Complex64)> + '_ {
        (0..self.len()).map(move |i| (self.w(i), self.z(i), self.values[i]))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Index of the entry of largest modulus.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.values.iter().enumerate() {
            if best.is_none_or(|(_, m)| v.norm() > m) {
                best = Some((i, v.norm()));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Appends another block of samples of the same dimension.
    pub fn extend(&mut self, other: GaborMatrixSamples) -> Result<()> {
        if other.d != self.d {
            return Err(Error::dim("sample blocks of different dimension"));
        }
        self.w.extend(other.w);
        self.z.extend(other.z);
        self.values.extend(other.values);
        Ok(())
    }
}

fn check_windows(g: &DiscreteSignal, gamma: &DiscreteSignal) -> Result<()> {
    g.grid().ensure_same(gamma.grid())?;
    if g.norm() == 0.0 || gamma.norm() == 0.0 {
        return Err(Error::invalid("windows must be nonzero"));
    }
    Ok(())
}

/// `Aπ(z)g`, the column of the Gabor matrix before testing against `π(w)γ`.
pub fn gabor_source(op: &OperatorHandle, g: &DiscreteSignal, z: &[f64]) -> Result<DiscreteSignal> {
    let d = g.grid().d;
    if z.len() != 2 * d {
        return Err(Error::dim("source point must lie in ℝ²ᵈ"));
    }
    op.apply(&g.tf_shift(&z[..d], &z[d..], true)?)
}

/// `w ↦ K_A(w, z)` on `ws` for a single source point.
pub fn gabor_column(
    op: &OperatorHandle,
    g: &DiscreteSignal,
    gamma: &DiscreteSignal,
    z: &[f64],
    ws: &PhaseGrid,
) -> Result<PhaseField> {
    check_windows(g, gamma)?;
    stft(&gabor_source(op, g, z)?, gamma, ws)
}

/// `K_A(w, z)` for every `z ∈ zs` and `w ∈ ws`.
pub fn gabor_matrix(
    op: &OperatorHandle,
    g: &DiscreteSignal,
    gamma: &DiscreteSignal,
    ws: &PhaseGrid,
    zs: &PhaseGrid,
) -> Result<GaborMatrixSamples> {
    let mut out = GaborMatrixSamples::empty(op.describe(), g.grid().d);
    gabor_matrix_visit(op, g, gamma, zs, |_| Ok(ws.clone()), |_, w, z, v| out.push(w, z, v))?;
    Ok(out)
}

/// Streams `K_A(w, z)` with a target set chosen per source point by
/// `ws_for(z)`; `visit` receives the source index, `w`, `z` and the value.
pub fn gabor_matrix_visit(
    op: &OperatorHandle,
    g: &DiscreteSignal,
    gamma: &DiscreteSignal,
    zs: &PhaseGrid,
    mut ws_for: impl FnMut(&[f64]) -> Result<PhaseGrid>,
    mut visit: impl FnMut(usize, &[f64], &[f64], Complex64),
) -> Result<()> {
    check_windows(g, gamma)?;
    if zs.dim() != g.grid().d {
        return Err(Error::dim("source grid dimension differs from the signal dimension"));
    }
    let mut z = vec![0.0; 2 * zs.dim()];
    for zi in 0..zs.len() {
        zs.point(zi, &mut z);
        let ws = ws_for(&z)?;
        let u = gabor_source(op, g, &z)?;
        stft_visit(&u, gamma, &ws, |_, w, v| visit(zi, w, &z, v))?;
    }
    Ok(())
}

/// The lattice `offsets` moved to `center`, with the shift rounded to whole
/// steps of each axis so that every moved lattice is a sublattice of one
/// fixed lattice.
pub fn tracking_lattice(center: &[f64], offsets: &[Axis]) -> Result<PhaseGrid> {
    if center.len() != offsets.len() || center.len() % 2 != 0 {
        return Err(Error::dim("center and offset axes must both live in ℝ²ᵈ"));
    }
    let axes = offsets
        .iter()
        .zip(center)
        .map(|(a, c)| Axis::new(a.start + (c / a.step).round() * a.step, a.step, a.count))
        .collect();
    PhaseGrid::lattice(center.len() / 2, axes)
}

/// Boxed form of [`OperatorHandle::Compose`] for two factors, `a` after `b`.
pub fn compose(a: OperatorHandle, b: OperatorHandle) -> OperatorHandle {
    let mut parts = Vec::new();
    for p in [a, b] {
        match p {
            OperatorHandle::Compose(inner) => parts.extend(inner),
            other => parts.push(other),
        }
    }
    OperatorHandle::Compose(parts)
}
