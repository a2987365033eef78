//! Sampled functions on truncated uniform grids `[−L, L)ᵈ`.
//!
//! Samples are stored row-major with the last axis fastest. The centered
//! transform maps a grid `(n, L)` onto its dual `(n, n/(4L))`, whose spacing
//! is `1/(2L)`; applying it twice returns to the original grid.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{fft_axis, fft_nd};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Uniform grid on `[−L, L)ᵈ` with `n` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
    pub half_width: f64,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, half_width: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("grid dimension must be positive"));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::invalid("samples per axis must be a power of two, at least 8"));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid("half width must be positive and finite"));
        }
        Ok(GridSpec { d, n, half_width })
    }

    /// Sample spacing `2L/n`.
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Spacing of the frequency grid, `1/(2L)`.
    pub fn freq_step(&self) -> f64 {
        0.5 / self.half_width
    }

    /// Half width of the frequency grid, `n/(4L)`.
    pub fn nyquist(&self) -> f64 {
        self.n as f64 / (4.0 * self.half_width)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.n; self.d]
    }

    /// The frequency grid, reinterpreted as a position grid.
    pub fn dual(&self) -> GridSpec {
        GridSpec { d: self.d, n: self.n, half_width: self.nyquist() }
    }

    /// `−L + j·h`.
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.h()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Writes the coordinates of the flat index `idx` into `out`.
    pub fn point(&self, idx: usize, out: &mut [f64]) {
        let mut rem = idx;
        for a in (0..self.d).rev() {
            out[a] = self.coord(rem % self.n);
            rem /= self.n;
        }
    }

    pub fn multi_index(&self, idx: usize, out: &mut [usize]) {
        let mut rem = idx;
        for a in (0..self.d).rev() {
            out[a] = rem % self.n;
            rem /= self.n;
        }
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    /// Cell volume `hᵈ`.
    pub fn cell(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.d == other.d && self.n == other.n && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(alloc::format!(
                "(d={}, n={}, L={}) vs (d={}, n={}, L={})",
                self.d,
                self.n,
                self.half_width,
                other.d,
                other.n,
                other.half_width
            )))
        }
    }
}

/// Complex samples of a function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscreteSignal {
    grid: GridSpec,
    samples: Vec<Complex64>,
}

impl DiscreteSignal {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::dim(alloc::format!("expected {} samples, got {}", grid.len(), samples.len())));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("signal samples must be finite"));
        }
        Ok(DiscreteSignal { grid, samples })
    }

    pub(crate) fn from_raw(grid: GridSpec, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        DiscreteSignal { grid, samples }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_raw(grid, vec![ZERO; grid.len()])
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let mut y = vec![0.0; grid.d];
        let samples = (0..grid.len())
            .map(|i| {
                grid.point(i, &mut y);
                f(&y)
            })
            .collect();
        Self::from_raw(grid, samples)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn map(&self, mut f: impl FnMut(&[f64], Complex64) -> Complex64) -> Self {
        let mut y = vec![0.0; self.grid.d];
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                self.grid.point(i, &mut y);
                f(&y, v)
            })
            .collect();
        Self::from_raw(self.grid, samples)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_raw(self.grid, self.samples.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self::from_raw(self.grid, self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self::from_raw(self.grid, self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect()))
    }

    pub fn conj(&self) -> Self {
        Self::from_raw(self.grid, self.samples.iter().map(|v| v.conj()).collect())
    }

    /// `f(−y)`, with `−L` mapped to itself (the grid is periodic).
    pub fn reflect(&self) -> Self {
        let n = self.grid.n;
        let mut m = vec![0usize; self.grid.d];
        let samples = (0..self.samples.len())
            .map(|i| {
                self.grid.multi_index(i, &mut m);
                for j in m.iter_mut() {
                    *j = (n - *j) % n;
                }
                self.samples[self.grid.flat_index(&m)]
            })
            .collect();
        Self::from_raw(self.grid, samples)
    }

    pub fn norm_sq(&self) -> f64 {
        self.grid.cell() * self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `⟨f, g⟩ = hᵈ Σ f·ḡ`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum::<Complex64>() * self.grid.cell())
    }

    /// Centered transform `F(ξ) = hᵈ Σ_y e^{−2πiy·ξ} f(y)` on the dual grid.
    pub fn fourier(&self) -> Self {
        centered_transform(self, false)
    }

    /// Inverse of [`DiscreteSignal::fourier`].
    pub fn inverse_fourier(&self) -> Self {
        centered_transform(self, true)
    }

    /// Multiplies by `e^{2πiy·ξ}`.
    pub fn modulate(&self, xi: &[f64]) -> Result<Self> {
        if xi.len() != self.grid.d {
            return Err(Error::dim("frequency shift has the wrong dimension"));
        }
        Ok(self.map(|y, v| v * Complex64::cis(2.0 * PI * crate::linalg::dot(y, xi))))
    }

    /// `f(y − x)`. Integer multiples of `h` are exact cyclic shifts; other
    /// shifts use the band-limited (Fourier) shift when `interpolate` is set.
    pub fn translate(&self, x: &[f64], interpolate: bool) -> Result<Self> {
        if x.len() != self.grid.d {
            return Err(Error::dim("translation has the wrong dimension"));
        }
        let h = self.grid.h();
        let steps: Vec<f64> = x.iter().map(|v| v / h).collect();
        let on_grid = steps.iter().all(|s| (s - s.round()).abs() <= 1e-9);
        if on_grid {
            let n = self.grid.n as i64;
            let shift: Vec<i64> = steps.iter().map(|s| s.round() as i64).collect();
            if shift.iter().all(|&s| s == 0) {
                return Ok(self.clone());
            }
            let mut m = vec![0usize; self.grid.d];
            let samples = (0..self.samples.len())
                .map(|i| {
                    self.grid.multi_index(i, &mut m);
                    for (j, s) in m.iter_mut().zip(&shift) {
                        *j = (*j as i64 - s).rem_euclid(n) as usize;
                    }
                    self.samples[self.grid.flat_index(&m)]
                })
                .collect();
            return Ok(Self::from_raw(self.grid, samples));
        }
        if !interpolate {
            return Err(Error::invalid("translation is not a multiple of the grid spacing"));
        }
        let spec = self.fourier().map(|xi, v| v * Complex64::cis(-2.0 * PI * crate::linalg::dot(x, xi)));
        Ok(spec.inverse_fourier())
    }

    /// `π(x, ξ)f = M_ξ T_x f`.
    pub fn tf_shift(&self, x: &[f64], xi: &[f64], interpolate: bool) -> Result<Self> {
        self.translate(x, interpolate)?.modulate(xi)
    }

    /// Band-limited refinement onto `n·factor` points over the same box.
    pub fn upsample(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !factor.is_power_of_two() {
            return Err(Error::invalid("upsampling factor must be a power of two"));
        }
        self.spectral_resize(self.grid.n * factor)
    }

    /// Same box, `n_new` points per axis: the spectrum is zero-padded or
    /// truncated symmetrically, so refinement is exact for the interpolant.
    pub fn spectral_resize(&self, n_new: usize) -> Result<Self> {
        let target = GridSpec::new(self.grid.d, n_new, self.grid.half_width)?;
        if n_new == self.grid.n {
            return Ok(self.clone());
        }
        let spec = self.fourier();
        let data = embed_centered(spec.samples(), self.grid.d, self.grid.n, n_new);
        Ok(Self::from_raw(target.dual(), data).inverse_fourier())
    }

    /// Same spacing, `n_new` points per axis: samples are cropped or padded
    /// with zeros symmetrically about the origin.
    pub fn spatial_resize(&self, n_new: usize) -> Result<Self> {
        let half = n_new as f64 * self.grid.h() / 2.0;
        let target = GridSpec::new(self.grid.d, n_new, half)?;
        if n_new == self.grid.n {
            return Ok(self.clone());
        }
        Ok(Self::from_raw(target, embed_centered(&self.samples, self.grid.d, self.grid.n, n_new)))
    }

    /// Evaluates the trigonometric interpolant on another grid, axis by axis.
    ///
    /// Points outside the source box get the value zero. The second return
    /// value is the fraction of the energy that the target grid cannot carry:
    /// the larger of the mass outside its box and the spectral mass beyond
    /// its Nyquist frequency.
    pub fn resample(&self, target: &GridSpec) -> Result<(Self, f64)> {
        if target.d != self.grid.d {
            return Err(Error::dim("target grid has a different dimension"));
        }
        let lost = self.lost_fraction(target);
        let mut data = self.samples.clone();
        let mut shape = self.grid.shape();
        for axis in 0..self.grid.d {
            data = resample_axis(&data, &shape, axis, &self.grid, target.coord(0), target.h(), target.n);
            shape[axis] = target.n;
        }
        Ok((Self::from_raw(*target, data), lost))
    }

    fn lost_fraction(&self, target: &GridSpec) -> f64 {
        let total: f64 = self.samples.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let outside = |sig: &DiscreteSignal, half: f64| -> f64 {
            let mut y = vec![0.0; sig.grid.d];
            let mut acc = 0.0;
            for (i, v) in sig.samples.iter().enumerate() {
                sig.grid.point(i, &mut y);
                if y.iter().any(|c| *c < -half * (1.0 + 1e-12) || *c >= half) {
                    acc += v.norm_sqr();
                }
            }
            acc
        };
        let spatial = outside(self, target.half_width) / total;
        let spec = self.fourier();
        let spec_total: f64 = spec.samples.iter().map(|v| v.norm_sqr()).sum();
        let spectral = outside(&spec, target.nyquist()) / spec_total;
        spatial.max(spectral)
    }

    /// Values of the trigonometric interpolant at arbitrary points
    /// (row-major, `d` coordinates each); zero outside the source box.
    pub fn eval_points(&self, points: &[f64]) -> Vec<Complex64> {
        let d = self.grid.d;
        let n = self.grid.n;
        let coeffs = self.interpolation_coefficients();
        let xi0 = -self.grid.nyquist();
        let dxi = self.grid.freq_step();
        let half = self.grid.half_width;
        let mut phases = vec![ZERO; d * n];
        let mut partial = vec![ZERO; coeffs.len()];
        points
            .chunks(d)
            .map(|p| {
                if p.iter().any(|c| *c < -half || *c >= half) {
                    return ZERO;
                }
                for a in 0..d {
                    for k in 0..n {
                        phases[a * n + k] = Complex64::cis(2.0 * PI * p[a] * (xi0 + k as f64 * dxi));
                    }
                }
                // contract the last axis first
                partial.copy_from_slice(&coeffs);
                let mut len = coeffs.len();
                for a in (0..d).rev() {
                    len /= n;
                    for o in 0..len {
                        let mut acc = ZERO;
                        for k in 0..n {
                            acc += partial[o * n + k] * phases[a * n + k];
                        }
                        partial[o] = acc;
                    }
                }
                partial[0]
            })
            .collect()
    }

    /// Coefficients `c_k` with `f(y) = Σ_k c_k e^{2πiy·ξ_k}` on the grid.
    fn interpolation_coefficients(&self) -> Vec<Complex64> {
        let norm = (2.0 * self.grid.half_width).powi(self.grid.d as i32);
        self.fourier().samples.iter().map(|v| v / norm).collect()
    }

    /// Largest `|y|` among samples with modulus at least `threshold·max|f|`.
    pub fn support_radius(&self, threshold: f64) -> f64 {
        let cut = threshold * self.max_abs();
        let mut y = vec![0.0; self.grid.d];
        let mut r: f64 = 0.0;
        for (i, v) in self.samples.iter().enumerate() {
            if v.norm() >= cut && cut > 0.0 {
                self.grid.point(i, &mut y);
                r = r.max(crate::linalg::norm(&y));
            }
        }
        r
    }
}

/// Copies the central block of a row-major `n^d` array into an `m^d` array,
/// index `j` going to `j + (m − n)/2` on every axis.
fn embed_centered(src: &[Complex64], d: usize, n: usize, m: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; m.pow(d as u32)];
    let offset = (m as i64 - n as i64) / 2;
    let mut idx = vec![0usize; d];
    for (i, v) in src.iter().enumerate() {
        let mut rem = i;
        let mut inside = true;
        for a in (0..d).rev() {
            let j = (rem % n) as i64 + offset;
            rem /= n;
            if j < 0 || j >= m as i64 {
                inside = false;
                break;
            }
            idx[a] = j as usize;
        }
        if inside {
            out[idx.iter().fold(0, |acc, &j| acc * m + j)] = *v;
        }
    }
    out
}

fn centered_transform(f: &DiscreteSignal, inverse: bool) -> DiscreteSignal {
    let grid = f.grid;
    let n = grid.n;
    let parity = |i: usize| -> f64 {
        let mut s = 0;
        let mut rem = i;
        for _ in 0..grid.d {
            s += rem % n;
            rem /= n;
        }
        if s % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let mut data: Vec<Complex64> = f.samples.iter().enumerate().map(|(i, v)| v * parity(i)).collect();
    fft_nd(&mut data, &grid.shape(), inverse).expect("grid sizes are powers of two");
    let scale = grid.cell();
    for (i, v) in data.iter_mut().enumerate() {
        *v *= parity(i) * scale;
    }
    DiscreteSignal::from_raw(grid.dual(), data)
}

/// Resamples along one axis by evaluating the one-dimensional interpolant
/// at `t0 + m·dt`, `m < count`.
pub(crate) fn resample_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    src: &GridSpec,
    t0: f64,
    dt: f64,
    count: usize,
) -> Vec<Complex64> {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out_shape = shape.to_vec();
    out_shape[axis] = count;
    let mut out = vec![ZERO; out_shape.iter().product()];

    let line_grid = GridSpec { d: 1, n, half_width: src.half_width };
    let mut line = vec![ZERO; n];
    let mut values = vec![ZERO; count];
    let evaluator = LineEvaluator::new(&line_grid, t0, dt, count);
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * stride];
            }
            evaluator.eval(&mut line, &mut values);
            let out_base = o * count * stride + s;
            for (m, v) in values.iter().enumerate() {
                out[out_base + m * stride] = *v;
            }
        }
    }
    out
}

/// Evaluates one-dimensional interpolants on a regular target grid.
pub(crate) struct LineEvaluator {
    n: usize,
    half: f64,
    t0: f64,
    dt: f64,
    count: usize,
    xi: Vec<f64>,
    step: Vec<Complex64>,
    h: f64,
}

impl LineEvaluator {
    const ANCHOR: usize = 32;

    pub(crate) fn new(src: &GridSpec, t0: f64, dt: f64, count: usize) -> Self {
        let n = src.n;
        let xi: Vec<f64> = (0..n).map(|k| -src.nyquist() + k as f64 * src.freq_step()).collect();
        let step = xi.iter().map(|x| Complex64::cis(2.0 * PI * dt * x)).collect();
        LineEvaluator { n, half: src.half_width, t0, dt, count, xi, step, h: src.h() }
    }

    /// `line` holds samples on entry and is overwritten with coefficients.
    pub(crate) fn eval(&self, line: &mut [Complex64], out: &mut [Complex64]) {
        let n = self.n;
        // coefficients c_k = F_k / (2L) with F the centered transform
        for (j, v) in line.iter_mut().enumerate() {
            if j % 2 == 1 {
                *v = -*v;
            }
        }
        fft_axis(line, &[n], 0, false).expect("power of two");
        let scale = self.h / (2.0 * self.half);
        for (k, v) in line.iter_mut().enumerate() {
            *v *= if k % 2 == 1 { -scale } else { scale };
        }
        let mut ph = vec![ZERO; n];
        let mut anchored_at = usize::MAX;
        for m in 0..self.count {
            let t = self.t0 + m as f64 * self.dt;
            if t < -self.half - 1e-12 * self.half || t >= self.half {
                out[m] = ZERO;
                anchored_at = usize::MAX;
                continue;
            }
            if anchored_at == usize::MAX || m - anchored_at >= Self::ANCHOR {
                for k in 0..n {
                    ph[k] = Complex64::cis(2.0 * PI * t * self.xi[k]);
                }
                anchored_at = m;
            } else {
                for k in 0..n {
                    ph[k] *= self.step[k];
                }
            }
            out[m] = line.iter().zip(&ph).map(|(c, p)| c * p).sum();
        }
    }
}

/// `e^{−π|y|²}` sampled on the grid.
pub fn gaussian_window(grid: GridSpec) -> DiscreteSignal {
    DiscreteSignal::from_fn(grid, |y| Complex64::new((-PI * crate::linalg::dot(y, y)).exp(), 0.0))
}

/// `2^{d/4} e^{−π|y|²}`, of unit L² norm.
pub fn gaussian_window_normalized(grid: GridSpec) -> DiscreteSignal {
    let c = 2f64.powf(grid.d as f64 / 4.0);
    gaussian_window(grid).scale(Complex64::new(c, 0.0))
}

/// `‖a − c·b‖ / ‖a‖` for the unimodular `c` that minimizes it.
pub fn phase_aligned_error(a: &DiscreteSignal, b: &DiscreteSignal) -> Result<f64> {
    let ip = a.inner(b)?;
    let c = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
    let na = a.norm();
    Ok(a.sub(&b.scale(c))?.norm() / if na > 0.0 { na } else { 1.0 })
}

/// Largest pointwise difference of moduli, `max ||a| − |b||`.
pub fn modulus_residual(a: &DiscreteSignal, b: &DiscreteSignal) -> Result<f64> {
    a.grid.ensure_same(&b.grid)?;
    Ok(a.samples.iter().zip(&b.samples).map(|(x, y)| (x.norm() - y.norm()).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, l: f64) -> GridSpec {
        GridSpec::new(1, n, l).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1, 12, 1.0).is_err());
        assert!(GridSpec::new(1, 4, 1.0).is_err());
        assert!(GridSpec::new(1, 8, 0.0).is_err());
        let g = grid(512, 8.0);
        assert_eq!(g.h(), 1.0 / 32.0);
        assert_eq!(g.nyquist(), 16.0);
        assert_eq!(g.dual().dual(), g);
        assert_eq!(g.coord(256), 0.0);
    }

    #[test]
    fn gaussian_examples() {
        let g = gaussian_window(grid(256, 6.0));
        assert_eq!(g.samples()[128], Complex64::new(1.0, 0.0));
        assert!((g.norm_sq() - 2f64.powf(-0.5)).abs() < 1e-8);
        for j in 1..128 {
            assert_eq!(g.samples()[128 + j], g.samples()[128 - j]);
        }
        let g2 = gaussian_window_normalized(GridSpec::new(2, 64, 6.0).unwrap());
        assert!((g2.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fourier_examples() {
        let gr = grid(512, 8.0);
        let g = gaussian_window(gr);
        let fg = g.fourier();
        let expected = gaussian_window(gr.dual());
        assert!(modulus_residual(&fg, &expected).unwrap() < 1e-8);
        assert!(fg.sub(&expected).unwrap().max_abs() < 1e-8);
        assert!((fg.norm() - g.norm()).abs() < 1e-10);
        let f4 = g.fourier().fourier().fourier().fourier();
        assert!(f4.sub(&g).unwrap().max_abs() < 1e-8);
        assert!(g.fourier().inverse_fourier().sub(&g).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn shifts() {
        let gr = grid(256, 8.0);
        let g = gaussian_window(gr);
        assert_eq!(g.tf_shift(&[0.0], &[0.0], false).unwrap(), g);
        let s = g.tf_shift(&[1.0], &[0.7], false).unwrap();
        assert!((s.norm() - g.norm()).abs() < 1e-14);
        let t = g.translate(&[1.0], false).unwrap();
        assert!(modulus_residual(&s, &t).unwrap() < 1e-15);
        assert!(g.translate(&[0.01], false).is_err());
        let frac = g.translate(&[0.3], true).unwrap();
        let exact = DiscreteSignal::from_fn(gr, |y| Complex64::new((-PI * (y[0] - 0.3).powi(2)).exp(), 0.0));
        assert!(frac.sub(&exact).unwrap().max_abs() < 1e-12);
        // π(z)π(z′) = c·π(z+z′)
        let a = g.tf_shift(&[0.5], &[1.0], true).unwrap().tf_shift(&[1.25], &[-0.3], true).unwrap();
        let b = g.tf_shift(&[1.75], &[0.7], true).unwrap();
        assert!(modulus_residual(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn resample_and_eval() {
        let gr = grid(128, 8.0);
        let g = gaussian_window(gr);
        let up = g.upsample(4).unwrap();
        assert!(up.sub(&gaussian_window(grid(512, 8.0))).unwrap().max_abs() < 1e-12);
        let target = grid(256, 5.0);
        let (r, lost) = g.resample(&target).unwrap();
        assert!(lost < 1e-12);
        assert!(r.sub(&gaussian_window(target)).unwrap().max_abs() < 1e-12);
        let vals = g.eval_points(&[0.123, -1.7, 9.0]);
        assert!((vals[0].re - (-PI * 0.123f64.powi(2)).exp()).abs() < 1e-12);
        assert!((vals[1].re - (-PI * 1.7f64.powi(2)).exp()).abs() < 1e-12);
        assert_eq!(vals[2], ZERO);
        let g2 = gaussian_window(GridSpec::new(2, 64, 4.0).unwrap());
        let v2 = g2.eval_points(&[0.3, -0.2]);
        assert!((v2[0].re - (-PI * 0.13f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn resizing() {
        let g = gaussian_window(grid(64, 4.0));
        let up = g.spectral_resize(256).unwrap();
        assert!(up.sub(&gaussian_window(grid(256, 4.0))).unwrap().max_abs() < 1e-13);
        let down = up.spectral_resize(64).unwrap();
        assert!(down.sub(&g).unwrap().max_abs() < 1e-13);
        let wide = g.spatial_resize(128).unwrap();
        assert_eq!(wide.grid().half_width, 8.0);
        assert!(wide.sub(&gaussian_window(grid(128, 8.0))).unwrap().max_abs() < 1e-13);
        assert!(wide.spatial_resize(64).unwrap().sub(&g).unwrap().max_abs() == 0.0);
        let g2 = gaussian_window(GridSpec::new(2, 32, 3.0).unwrap());
        let up2 = g2.spectral_resize(64).unwrap();
        assert!(up2.sub(&gaussian_window(GridSpec::new(2, 64, 3.0).unwrap())).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn reflect_and_alignment() {
        let gr = grid(64, 4.0);
        let f = DiscreteSignal::from_fn(gr, |y| Complex64::new(y[0] * (-PI * y[0] * y[0]).exp(), 0.0));
        let r = f.reflect();
        assert!(r.add(&f).unwrap().max_abs() < 1e-15);
        let rotated = f.scale(Complex64::cis(1.1));
        assert!(phase_aligned_error(&f, &rotated).unwrap() < 1e-15);
    }
}
