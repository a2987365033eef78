//! Metaplectic operators acting on sampled signals.
//!
//! An operator is applied as the product of its generators (chirps, one
//! rescaling, one or two Fourier transforms). The factors can widen a
//! signal a lot in position or frequency, so every step runs on a working
//! grid chosen from the measured support of the current signal; the result
//! is resampled onto the input grid at the end. Operators are realized up to
//! a unimodular constant.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::signal::{resample_axis, DiscreteSignal, GridSpec};
use crate::symplectic::{
    euler_decompose, free_factorization, EulerDecomposition, Generator, GeneratorFactorization, SymplecticMatrix,
};

/// Samples below this fraction of the peak modulus count as outside the support.
const SUPPORT_THRESHOLD: f64 = 1e-13;
/// Largest working grid, in samples.
const MAX_WORKING_POINTS: usize = 1 << 24;
/// Largest energy fraction the output grid may fail to carry.
const LOST_ENERGY_LIMIT: f64 = 1e-8;

fn padded(r: f64) -> f64 {
    1.15 * r + 1.0
}

#[derive(Debug, Clone, Copy)]
struct Extent {
    x: f64,
    xi: f64,
}

fn extent(sig: &DiscreteSignal) -> Extent {
    Extent { x: sig.support_radius(SUPPORT_THRESHOLD), xi: sig.fourier().support_radius(SUPPORT_THRESHOLD) }
}

fn check_size(d: usize, n: usize) -> Result<()> {
    match n.checked_pow(d as u32) {
        Some(total) if total <= MAX_WORKING_POINTS => Ok(()),
        _ => Err(Error::Resampling(format!(
            "working grid of {n} points per axis exceeds the limit; the operator stretches the signal too far"
        ))),
    }
}

/// A grid on `[−L, L)ᵈ` with `L ≥ half` and Nyquist frequency `≥ nyquist`.
fn grid_covering(d: usize, half: f64, nyquist: f64) -> Result<GridSpec> {
    let mut n = 8usize;
    while (n as f64) < 4.0 * half * nyquist {
        n *= 2;
        check_size(d, n)?;
    }
    GridSpec::new(d, n, half)
}

/// Exact change of working grid: pad or crop at fixed spacing, then refine
/// or coarsen the spectrum at fixed box.
fn regrid(sig: &DiscreteSignal, half: f64, nyquist: f64) -> Result<DiscreteSignal> {
    let g = *sig.grid();
    let mut m = 8usize;
    while (m as f64) * g.h() / 2.0 < half {
        m *= 2;
        check_size(g.d, m)?;
    }
    let sig = sig.spatial_resize(m)?;
    let mut n = m;
    let mut nyq = sig.grid().nyquist();
    while nyq < nyquist {
        n *= 2;
        nyq *= 2.0;
        check_size(g.d, n)?;
    }
    while n > 8 && nyq / 2.0 >= nyquist {
        n /= 2;
        nyq /= 2.0;
    }
    sig.spectral_resize(n)
}

fn ensure_symmetric(c: &Matrix, d: usize) -> Result<()> {
    if c.rows() != d || c.cols() != d {
        return Err(Error::dim("chirp matrix must be d × d"));
    }
    if !c.is_symmetric(1e-12 * c.max_abs().max(1.0)) {
        return Err(Error::invalid("chirp matrix must be symmetric"));
    }
    Ok(())
}

/// Pointwise multiplication by `e^{πi y·Cy}` on the grid of `f`.
pub fn apply_chirp(c: &Matrix, f: &DiscreteSignal) -> Result<DiscreteSignal> {
    ensure_symmetric(c, f.grid().d)?;
    Ok(chirp_samples(c, f))
}

fn chirp_samples(c: &Matrix, f: &DiscreteSignal) -> DiscreteSignal {
    f.map(|y, v| v * Complex64::cis(PI * dot(y, &c.mul_vec(y))))
}

/// `|det M|^{−1/2} f(M⁻¹t)`, returned on the grid of `f`.
pub fn apply_scaling(m: &Matrix, f: &DiscreteSignal) -> Result<DiscreteSignal> {
    apply_generators(&[Generator::Scaling(m.clone())], f)
}

/// Evaluates `|det M|^{−1/2} f(M⁻¹t)` on `target` from the interpolant of `f`.
fn scale_onto(f: &DiscreteSignal, m: &Matrix, target: &GridSpec) -> Result<DiscreteSignal> {
    let d = f.grid().d;
    if m.rows() != d || m.cols() != d {
        return Err(Error::dim("scaling matrix must be d × d"));
    }
    let minv = m.inverse()?;
    let amp = 1.0 / m.determinant()?.abs().sqrt();
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || minv[(i, j)] == 0.0));
    let samples = if diagonal {
        let mut data = f.samples().to_vec();
        let mut shape = f.grid().shape();
        let line = GridSpec { d: 1, ..*f.grid() };
        for a in 0..d {
            let s = minv[(a, a)];
            data = resample_axis(&data, &shape, a, &line, s * target.coord(0), s * target.h(), target.n);
            shape[a] = target.n;
        }
        data
    } else {
        let mut pts = vec![0.0; target.len() * d];
        let mut t = vec![0.0; d];
        for (i, chunk) in pts.chunks_mut(d).enumerate() {
            target.point(i, &mut t);
            chunk.copy_from_slice(&minv.mul_vec(&t));
        }
        f.eval_points(&pts)
    };
    DiscreteSignal::new(*target, samples.into_iter().map(|v| v * amp).collect())
}

fn apply_one(gen: &Generator, sig: DiscreteSignal) -> Result<DiscreteSignal> {
    let d = sig.grid().d;
    match gen {
        Generator::Chirp(c) => {
            ensure_symmetric(c, d)?;
            if c.max_abs() == 0.0 {
                return Ok(sig);
            }
            let e = extent(&sig);
            let sig = regrid(&sig, padded(e.x), padded(e.xi + c.spectral_norm() * e.x))?;
            Ok(chirp_samples(c, &sig))
        }
        Generator::Fourier => Ok(sig.fourier()),
        Generator::Scaling(m) => {
            let e = extent(&sig);
            let inv_norm = m.inverse()?.spectral_norm();
            let target = grid_covering(d, padded(m.spectral_norm() * e.x), padded(inv_norm * e.xi))?;
            scale_onto(&sig, m, &target)
        }
    }
}

/// Applies generators in order (the first one acts first) and resamples the
/// result onto the grid of `f`.
pub fn apply_generators(gens: &[Generator], f: &DiscreteSignal) -> Result<DiscreteSignal> {
    let mut sig = f.clone();
    for g in gens {
        sig = apply_one(g, sig)?;
    }
    let (out, lost) = sig.resample(f.grid())?;
    if lost > LOST_ENERGY_LIMIT {
        return Err(Error::Resampling(format!(
            "a fraction {lost:e} of the energy falls outside the output grid; increase L (or n)"
        )));
    }
    Ok(out)
}

/// `μ(S)` together with its generator factorization and Euler decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaplecticOperator {
    s: SymplecticMatrix,
    factors: GeneratorFactorization,
    decomposition: EulerDecomposition,
}

impl MetaplecticOperator {
    pub fn new(s: SymplecticMatrix) -> Result<Self> {
        let factors = free_factorization(&s)?;
        let decomposition = euler_decompose(&s)?;
        Ok(MetaplecticOperator { s, factors, decomposition })
    }

    pub fn symplectic(&self) -> &SymplecticMatrix {
        &self.s
    }

    pub fn factors(&self) -> &GeneratorFactorization {
        &self.factors
    }

    pub fn decomposition(&self) -> &EulerDecomposition {
        &self.decomposition
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.s.inverse())
    }

    pub fn apply(&self, f: &DiscreteSignal) -> Result<DiscreteSignal> {
        apply_metaplectic(self, f)
    }
}

/// `μ(S)f`, up to a unimodular constant.
pub fn apply_metaplectic(op: &MetaplecticOperator, f: &DiscreteSignal) -> Result<DiscreteSignal> {
    if op.s.dim() != f.grid().d {
        return Err(Error::dim("operator and signal dimensions differ"));
    }
    apply_generators(&op.factors.generators(), f)
}

/// `ℱ⁻¹ e^{−2πit|ξ|²} ℱ f`, exactly unitary on the grid.
pub fn free_propagator(t: f64, f: &DiscreteSignal) -> DiscreteSignal {
    f.fourier().map(|xi, v| v * Complex64::cis(-2.0 * PI * t * dot(xi, xi))).inverse_fourier()
}

/// Refines `src` until `Σ_y hᵈ src(y)·u(y)` is exact for integrands whose
/// spectrum extends `extra` beyond that of `src`.
fn refine_for_sum(src: &DiscreteSignal, extra: f64) -> Result<DiscreteSignal> {
    let e = extent(src);
    let need = padded(e.xi + extra);
    let mut n = src.grid().n;
    let mut h = src.grid().h();
    while 1.0 / h < need {
        n *= 2;
        h /= 2.0;
        check_size(src.grid().d, n)?;
    }
    src.spectral_resize(n)
}

/// Nonzero samples of `a` as `(y, value)` pairs.
fn support_list(a: &DiscreteSignal) -> Vec<(Vec<f64>, Complex64)> {
    let cut = 1e-17 * a.max_abs();
    let mut y = vec![0.0; a.grid().d];
    let mut out = Vec::new();
    for (i, v) in a.samples().iter().enumerate() {
        if v.norm() > cut {
            a.grid().point(i, &mut y);
            out.push((y.clone(), *v));
        }
    }
    out
}

/// `hᵈ Σ_y a(y) e^{−2πi y·ω}` over a support list.
fn direct_sum(list: &[(Vec<f64>, Complex64)], omega: &[f64], cell: f64) -> Complex64 {
    list.iter().map(|(y, v)| v * Complex64::cis(-2.0 * PI * dot(y, omega))).sum::<Complex64>() * cell
}

/// `hᵈ Σ_y f(y) e^{−2πiy·ξ}` evaluated at the points of `out` by direct
/// summation.
fn direct_dft(f: &DiscreteSignal, out: &GridSpec) -> Result<DiscreteSignal> {
    let reach = out.half_width * (out.d as f64).sqrt();
    let fine = refine_for_sum(f, reach)?;
    let list = support_list(&fine);
    let cell = fine.grid().cell();
    Ok(DiscreteSignal::from_fn(*out, |xi| direct_sum(&list, xi, cell)))
}

/// Direct quadrature of the kernel
/// `|det B|^{−1/2} e^{πi x·Px} ∫ e^{−2πi y·B⁻¹x} e^{πi y·Qy} f(y) dy`.
fn kernel_quadrature(
    p: &Matrix,
    q: &Matrix,
    b: &Matrix,
    f: &DiscreteSignal,
    out: &GridSpec,
) -> Result<DiscreteSignal> {
    let binv = b.inverse()?;
    let amp = 1.0 / b.determinant()?.abs().sqrt();
    let e = extent(f);
    let reach = binv.spectral_norm() * out.half_width * (out.d as f64).sqrt() + q.spectral_norm() * e.x;
    let fine = refine_for_sum(f, reach)?;
    let integrand = chirp_samples(q, &fine);
    let list = support_list(&integrand);
    let cell = fine.grid().cell();
    Ok(DiscreteSignal::from_fn(*out, |x| {
        let omega = binv.mul_vec(x);
        direct_sum(&list, &omega, cell) * Complex64::cis(PI * dot(x, &p.mul_vec(x))) * amp
    }))
}

/// Independent realization of `μ(S)f` by direct quadrature of its integral
/// kernel. Quadratic cost; intended for tests.
pub fn metaplectic_oracle(s: &SymplecticMatrix, f: &DiscreteSignal) -> Result<DiscreteSignal> {
    let fact = free_factorization(s)?;
    let d = s.dim();
    if f.grid().d != d {
        return Err(Error::dim("operator and signal dimensions differ"));
    }
    let (p, q, b) = (&fact.post_chirp, &fact.pre_chirp, &fact.scaling);
    if fact.ft_count == 1 {
        return kernel_quadrature(p, q, b, f, f.grid());
    }
    // μ(S) = μ(S′)·ℱ·e^{−πiλ|y|²}
    let lambda = fact.lambda;
    let e = extent(f);
    let band = e.xi + lambda.abs() * e.x;
    let src = regrid(f, padded(e.x), padded(band))?;
    let chirped = src.map(|y, v| v * Complex64::cis(-PI * lambda * dot(y, y)));
    let mid_grid = grid_covering(d, padded(band), padded(e.x))?;
    let mid = direct_dft(&chirped, &mid_grid)?;
    kernel_quadrature(p, q, b, &mid, f.grid())
}
