//! Measured envelope constants of Gabor matrices.
//!
//! For an operator with canonical map `S = UᵀDV` the refined constant is
//! `sup |K(w,z)|·(det Σ)^{1/2}·(1+|D′U(w−Sz)|)^N` and the naive one is
//! `sup |K(w,z)|·(1+|w−Sz|)^N`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gabor::{gabor_matrix_visit, tracking_lattice, GaborMatrixSamples, OperatorHandle};
use crate::linalg::{norm, Matrix};
use crate::phase::{Axis, PhaseGrid};
use crate::signal::{gaussian_window, DiscreteSignal, GridSpec};
use crate::symplectic::{euler_decompose, free_particle_flow, random_symplectic, EulerDecomposition, SymplecticMatrix};

/// Measured constants for one operator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnvelopeReport {
    pub label: String,
    pub operator: String,
    pub n_order: f64,
    pub windows: (String, String),
    pub sigma: Vec<f64>,
    pub det_sigma: f64,
    pub c_refined: f64,
    pub c_naive: f64,
    pub samples: usize,
    pub grid: Option<GridSpec>,
    /// Caveats on what the numbers can support.
    pub flags: Vec<String>,
}

/// Running maxima of the two weighted moduli.
#[derive(Debug, Clone)]
pub struct EnvelopeAccumulator {
    s: SymplecticMatrix,
    spreading: Matrix,
    root_det: f64,
    n_order: f64,
    pub c_refined: f64,
    pub c_naive: f64,
    pub samples: usize,
    diff: Vec<f64>,
}

impl EnvelopeAccumulator {
    pub fn new(s: &SymplecticMatrix, dec: &EulerDecomposition, n_order: f64) -> Result<Self> {
        if dec.dim() != s.dim() {
            return Err(Error::dim("decomposition and matrix dimensions differ"));
        }
        if !(n_order >= 0.0) {
            return Err(Error::invalid("decay order must be nonnegative"));
        }
        Ok(EnvelopeAccumulator {
            s: s.clone(),
            spreading: dec.spreading(),
            root_det: dec.det_sigma().sqrt(),
            n_order,
            c_refined: 0.0,
            c_naive: 0.0,
            samples: 0,
            diff: vec![0.0; 2 * s.dim()],
        })
    }

    /// `(|D′U(w−Sz)|, |w−Sz|)`.
    pub fn distances(&mut self, w: &[f64], z: &[f64]) -> (f64, f64) {
        let sz = self.s.apply(z);
        for ((d, a), b) in self.diff.iter_mut().zip(w).zip(&sz) {
            *d = a - b;
        }
        (norm(&self.spreading.mul_vec(&self.diff)), norm(&self.diff))
    }

    pub fn push(&mut self, w: &[f64], z: &[f64], modulus: f64) {
        let (refined, naive) = self.distances(w, z);
        self.samples += 1;
        self.c_refined = self.c_refined.max(modulus * self.root_det * (1.0 + refined).powf(self.n_order));
        self.c_naive = self.c_naive.max(modulus * (1.0 + naive).powf(self.n_order));
    }
}

/// Envelope constants of stored Gabor-matrix samples.
pub fn envelope_constants(
    samples: &GaborMatrixSamples,
    s: &SymplecticMatrix,
    dec: &EulerDecomposition,
    n_order: f64,
) -> Result<EnvelopeReport> {
    if samples.is_empty() {
        return Err(Error::invalid("no Gabor-matrix samples"));
    }
    if samples.dim() != s.dim() {
        return Err(Error::dim("samples and matrix dimensions differ"));
    }
    let mut acc = EnvelopeAccumulator::new(s, dec, n_order)?;
    for (w, z, v) in samples.iter() {
        acc.push(w, z, v.norm());
    }
    Ok(finish(String::new(), samples.operator.clone(), dec, acc, None))
}

fn finish(
    label: String,
    operator: String,
    dec: &EulerDecomposition,
    acc: EnvelopeAccumulator,
    grid: Option<GridSpec>,
) -> EnvelopeReport {
    EnvelopeReport {
        label,
        operator,
        n_order: acc.n_order,
        windows: (String::from("gaussian"), String::from("gaussian")),
        sigma: dec.sigma().to_vec(),
        det_sigma: dec.det_sigma(),
        c_refined: acc.c_refined,
        c_naive: acc.c_naive,
        samples: acc.samples,
        grid,
        flags: Vec::new(),
    }
}

/// Radial profile of `(det Σ)^{1/2}|K|` in the dilated distance
/// `|D′U(w−Sz)|`, with its Lʳ norms on ℝ²ᵈ.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnvelopeProfile {
    pub bucket_width: f64,
    /// Sup per bucket `[k·width, (k+1)·width)`; zero for empty buckets.
    pub sups: Vec<f64>,
    pub counts: Vec<usize>,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl EnvelopeProfile {
    /// Whether the profile never increases after the first bucket by more
    /// than `slack` times its peak, ignoring empty buckets.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        let filled: Vec<f64> = self.sups.iter().zip(&self.counts).filter(|(_, &c)| c > 0).map(|(s, _)| *s).collect();
        filled.windows(2).skip(1).all(|w| w[1] <= w[0] + slack * self.linf)
    }
}

pub fn envelope_profile(
    samples: &GaborMatrixSamples,
    s: &SymplecticMatrix,
    dec: &EulerDecomposition,
    bucket_width: f64,
) -> Result<EnvelopeProfile> {
    if !(bucket_width > 0.0) {
        return Err(Error::invalid("bucket width must be positive"));
    }
    let d = s.dim();
    let mut acc = EnvelopeAccumulator::new(s, dec, 0.0)?;
    let mut sups: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for (w, z, v) in samples.iter() {
        let (r, _) = acc.distances(w, z);
        let k = (r / bucket_width) as usize;
        if k >= sups.len() {
            sups.resize(k + 1, 0.0);
            counts.resize(k + 1, 0);
        }
        sups[k] = sups[k].max(acc.root_det * v.norm());
        counts[k] += 1;
    }
    // volume of the unit ball in ℝ²ᵈ is πᵈ/d!
    let ball = core::f64::consts::PI.powi(d as i32) / (1..=d).map(|k| k as f64).product::<f64>();
    let shell = |k: usize| {
        let (a, b) = (k as f64 * bucket_width, (k + 1) as f64 * bucket_width);
        ball * (b.powi(2 * d as i32) - a.powi(2 * d as i32))
    };
    let l1 = sups.iter().enumerate().map(|(k, h)| h * shell(k)).sum();
    let l2 = sups.iter().enumerate().map(|(k, h)| h * h * shell(k)).sum::<f64>().sqrt();
    let linf = sups.iter().copied().fold(0.0, f64::max);
    Ok(EnvelopeProfile { bucket_width, sups, counts, l1, l2, linf })
}

/// Sampling plan for measured envelopes: source points, the spacing of the
/// target lattice around each `Sz`, and the decay order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnvelopeConfig {
    pub d: usize,
    pub n_order: f64,
    /// Source points, `2d` coordinates each.
    pub sources: Vec<f64>,
    pub step: f64,
    /// Target lattice half-width in units of `√(1+σ₁²)`, plus `margin`.
    pub reach: f64,
    pub margin: f64,
}

impl EnvelopeConfig {
    pub fn default_for(d: usize) -> Self {
        let mut sources = vec![0.0; 2 * d];
        for axis in 0..2 * d {
            let mut z = vec![0.0; 2 * d];
            z[axis] = 1.0;
            sources.extend(z);
        }
        EnvelopeConfig { d, n_order: 4.0, sources, step: 0.25, reach: 3.0, margin: 3.0 }
    }

    pub fn dim(&self) -> Result<usize> {
        if self.d == 0 || self.sources.is_empty() || self.sources.len() % (2 * self.d) != 0 {
            return Err(Error::dim("source list must hold 2d coordinates per point"));
        }
        Ok(self.d)
    }
}

/// Signal grid and target offsets that hold every `π(w)γ` with `w` within
/// the lattice reach of some `Sz`.
pub fn envelope_grid(s: &SymplecticMatrix, cfg: &EnvelopeConfig, d: usize) -> Result<(GridSpec, Vec<Axis>)> {
    if !(cfg.step > 0.0) || !(cfg.reach > 0.0) {
        return Err(Error::invalid("lattice step and reach must be positive"));
    }
    let sigma1 = s.matrix().spectral_norm();
    let rho = cfg.reach * (1.0 + sigma1 * sigma1).sqrt() + cfg.margin;
    let sources = PhaseGrid::from_points(d, cfg.sources.clone())?;
    let mut far: f64 = 0.0;
    let mut z = vec![0.0; 2 * d];
    for i in 0..sources.len() {
        sources.point(i, &mut z);
        far = s.apply(&z).iter().fold(far, |m, c| m.max(c.abs()));
    }
    // window tails reach about 6 beyond the lattice
    let need = far + rho + cfg.step + 6.0;
    let mut half = 1.0;
    while half < need {
        half *= 2.0;
    }
    let mut n = 8usize;
    while (n as f64) < 4.0 * half * need || 2.0 * half / n as f64 > cfg.step {
        n *= 2;
    }
    let count = (rho / cfg.step).ceil() as usize;
    let offsets = vec![Axis::centered(0.0, cfg.step, count); 2 * d];
    Ok((GridSpec::new(d, n, half)?, offsets))
}

/// Measures the envelope constants of `op` on its own grid with Gaussian
/// windows and a target lattice tracking `Sz`.
pub fn envelope_report(label: &str, op: &OperatorHandle, cfg: &EnvelopeConfig) -> Result<EnvelopeReport> {
    let d = cfg.dim()?;
    let s = op.canonical_map(d)?;
    let dec = euler_decompose(&s)?;
    let (grid, offsets) = envelope_grid(&s, cfg, d)?;
    let g = gaussian_window(grid);
    let mut acc = EnvelopeAccumulator::new(&s, &dec, cfg.n_order)?;
    let sources = PhaseGrid::from_points(d, cfg.sources.clone())?;
    let centre_map = s.clone();
    gabor_matrix_visit(
        op,
        &g,
        &g,
        &sources,
        |z| tracking_lattice(&centre_map.apply(z), &offsets),
        |_, w, z, v| acc.push(w, z, v.norm()),
    )?;
    let mut report = finish(String::from(label), op.describe(), &dec, acc, Some(grid));
    if !op.is_unitary() {
        report.flags.push(String::from("operator is not unitary; the Cauchy–Schwarz bound does not apply"));
    }
    Ok(report)
}

/// A named operator of an envelope family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub label: String,
    pub op: OperatorHandle,
}

/// `μ(S_t)` for each `t`, labelled `free t=…`.
pub fn free_particle_family(ts: &[f64], d: usize) -> Result<Vec<FamilyMember>> {
    ts.iter()
        .map(|&t| {
            Ok(FamilyMember { label: format!("free t={t}"), op: OperatorHandle::metaplectic(free_particle_flow(t, d))? })
        })
        .collect()
}

/// `μ(S)` for random `S` with singular values up to `sigma_max`.
pub fn random_family(seeds: &[u64], d: usize, sigma_max: f64) -> Result<Vec<FamilyMember>> {
    seeds
        .iter()
        .map(|&seed| {
            Ok(FamilyMember {
                label: format!("random seed={seed}"),
                op: OperatorHandle::metaplectic(random_symplectic(seed, d, sigma_max)?)?,
            })
        })
        .collect()
}

/// Spread of the constants over a family.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FamilyReport {
    pub members: Vec<EnvelopeReport>,
    /// `max/min` of `c_refined`.
    pub refined_spread: f64,
    /// `max/min` of `c_naive`.
    pub naive_spread: f64,
    /// `c_naive` strictly increasing along the members labelled `free`.
    pub naive_increasing_along_free: bool,
    pub refined_limit: f64,
    pub naive_floor: f64,
}

impl FamilyReport {
    pub fn new(members: Vec<EnvelopeReport>, refined_limit: f64, naive_floor: f64) -> Self {
        let spread = |f: fn(&EnvelopeReport) -> f64| {
            let hi = members.iter().map(f).fold(0.0, f64::max);
            let lo = members.iter().map(f).fold(f64::INFINITY, f64::min);
            hi / lo
        };
        let free: Vec<f64> = members.iter().filter(|m| m.label.starts_with("free")).map(|m| m.c_naive).collect();
        FamilyReport {
            refined_spread: spread(|m| m.c_refined),
            naive_spread: spread(|m| m.c_naive),
            naive_increasing_along_free: free.windows(2).all(|w| w[1] > w[0]),
            refined_limit,
            naive_floor,
            members,
        }
    }

    /// Refined spread within the limit, naive spread above the floor and
    /// increasing along the free-particle members.
    pub fn passes(&self) -> bool {
        self.refined_spread <= self.refined_limit
            && self.naive_spread >= self.naive_floor
            && self.naive_increasing_along_free
    }
}

/// `(1 + |y|²)^{−s/2}`, a window with only algebraic decay. On a finite grid
/// it is cut off at the box edge, so measurements with it are indicative only.
pub fn algebraic_window(grid: GridSpec, s: f64) -> DiscreteSignal {
    DiscreteSignal::from_fn(grid, |y| {
        num_complex::Complex64::new((1.0 + crate::linalg::dot(y, y)).powf(-s / 2.0), 0.0)
    })
}

/// Envelope of `op` measured with algebraically decaying windows and
/// weight `(1+|D′U(w−Sz)|)^{s−2d}`; always flagged as truncation-limited.
pub fn algebraic_window_report(
    label: &str,
    op: &OperatorHandle,
    grid: GridSpec,
    s_decay: f64,
    ws_offsets: &[Axis],
    sources: &PhaseGrid,
) -> Result<EnvelopeReport> {
    let d = grid.d;
    let s = op.canonical_map(d)?;
    let dec = euler_decompose(&s)?;
    let g = algebraic_window(grid, s_decay);
    let order = (s_decay - 2.0 * d as f64).max(0.0);
    let mut acc = EnvelopeAccumulator::new(&s, &dec, order)?;
    gabor_matrix_visit(
        op,
        &g,
        &g,
        sources,
        |z| tracking_lattice(&s.apply(z), ws_offsets),
        |_, w, z, v| acc.push(w, z, v.norm()),
    )?;
    let mut report = finish(String::from(label), op.describe(), &dec, acc, Some(grid));
    report.windows = (format!("algebraic s={s_decay}"), format!("algebraic s={s_decay}"));
    let edge = (1.0 + grid.half_width * grid.half_width).powf(-s_decay / 2.0);
    report.flags.push(format!(
        "algebraic windows are truncated at the box edge (relative size {edge:e}); constants are indicative only"
    ));
    Ok(report)
}
