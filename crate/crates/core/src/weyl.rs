//! Weyl quantization `aʷf(x) = ∫∫ a((x+y)/2, ξ) e^{2πi(x−y)·ξ} f(y) dy dξ`
//! on a sampled grid, and the symplectic covariance test.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::linalg::Matrix;
use crate::metaplectic::MetaplecticOperator;
use crate::phase::Axis;
use crate::signal::{phase_aligned_error, DiscreteSignal};
use crate::symplectic::SymplecticMatrix;

/// A symbol `a(x, ξ)` on ℝ²ᵈ.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum WeylSymbol {
    Constant(Complex64),
    /// The coordinate function `z ↦ z_axis` (`x` axes first, then `ξ`).
    Coordinate { axis: usize },
    /// `amplitude·e^{−π|z − center|²/width²}`.
    Gaussian { center: Vec<f64>, width: f64, amplitude: f64 },
    /// `z ↦ inner(Sz)`.
    Composed { inner: Box<WeylSymbol>, s: Matrix },
    /// Samples on a tensor lattice, multilinear in between and zero outside.
    Sampled { axes: Vec<Axis>, values: Vec<Complex64> },
}

impl WeylSymbol {
    /// The standard Gaussian `e^{−π|z|²}` on ℝ²ᵈ.
    pub fn standard_gaussian(d: usize) -> Self {
        WeylSymbol::Gaussian { center: vec![0.0; 2 * d], width: 1.0, amplitude: 1.0 }
    }

    /// `a ∘ S`.
    pub fn compose(self, s: &SymplecticMatrix) -> Self {
        WeylSymbol::Composed { inner: Box::new(self), s: s.matrix().clone() }
    }

    /// Checks that the symbol can be evaluated on ℝ²ᵈ.
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            WeylSymbol::Constant(c) if !c.re.is_finite() || !c.im.is_finite() => {
                Err(Error::invalid("constant symbol must be finite"))
            }
            WeylSymbol::Constant(_) => Ok(()),
            WeylSymbol::Coordinate { axis } if *axis >= 2 * d => Err(Error::dim("coordinate axis out of range")),
            WeylSymbol::Coordinate { .. } => Ok(()),
            WeylSymbol::Gaussian { center, width, amplitude } => {
                if center.len() != 2 * d {
                    return Err(Error::dim("Gaussian center must lie in ℝ²ᵈ"));
                }
                if !(*width > 0.0) || !amplitude.is_finite() || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::invalid("Gaussian symbol needs a positive width and finite data"));
                }
                Ok(())
            }
            WeylSymbol::Composed { inner, s } => {
                if s.rows() != 2 * d || s.cols() != 2 * d {
                    return Err(Error::dim("composed symbol needs a 2d × 2d matrix"));
                }
                inner.validate(d)
            }
            WeylSymbol::Sampled { axes, values } => {
                if axes.len() != 2 * d {
                    return Err(Error::dim("sampled symbol needs 2d axes"));
                }
                if axes.iter().map(|a| a.count).product::<usize>() != values.len() {
                    return Err(Error::dim("sampled symbol value count does not match its axes"));
                }
                if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::invalid("symbol samples must be finite"));
                }
                Ok(())
            }
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            WeylSymbol::Constant(c) => c.im == 0.0,
            WeylSymbol::Coordinate { .. } | WeylSymbol::Gaussian { .. } => true,
            WeylSymbol::Composed { inner, .. } => inner.is_real(),
            WeylSymbol::Sampled { values, .. } => values.iter().all(|v| v.im == 0.0),
        }
    }

    pub fn eval(&self, z: &[f64]) -> Complex64 {
        match self {
            WeylSymbol::Constant(c) => *c,
            WeylSymbol::Coordinate { axis } => Complex64::new(z[*axis], 0.0),
            WeylSymbol::Gaussian { center, width, amplitude } => {
                let r2: f64 = z.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                Complex64::new(amplitude * (-PI * r2 / (width * width)).exp(), 0.0)
            }
            WeylSymbol::Composed { inner, s } => inner.eval(&s.mul_vec(z)),
            WeylSymbol::Sampled { axes, values } => multilinear(axes, values, z),
        }
    }
}

fn multilinear(axes: &[Axis], values: &[Complex64], z: &[f64]) -> Complex64 {
    let dims = axes.len();
    let mut base = vec![0usize; dims];
    let mut frac = vec![0.0; dims];
    for a in 0..dims {
        let t = (z[a] - axes[a].start) / axes[a].step;
        let last = (axes[a].count - 1) as f64;
        if !(t >= 0.0 && t <= last) {
            return Complex64::new(0.0, 0.0);
        }
        let k = (t.floor() as usize).min(axes[a].count.saturating_sub(2));
        base[a] = k;
        frac[a] = if axes[a].count > 1 { t - k as f64 } else { 0.0 };
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..(1usize << dims) {
        let mut w = 1.0;
        let mut flat = 0usize;
        for a in 0..dims {
            let up = (corner >> a) & 1 == 1 && axes[a].count > 1;
            w *= if up { frac[a] } else { 1.0 - frac[a] };
            flat = flat * axes[a].count + base[a] + usize::from(up);
        }
        if w != 0.0 {
            acc += values[flat] * w;
        }
    }
    acc
}

/// `aʷf` on the grid of `f`.
///
/// For every midpoint `m` of the doubled grid the kernel
/// `K_m(τ) = ∫ a(m, ξ) e^{2πiτ·ξ} dξ` is obtained from one inverse FFT over
/// the frequency grid. Lags are taken modulo the box, as for the periodic
/// extension of `f`, which makes `ξʷ` the spectral derivative.
pub fn weyl_apply(a: &WeylSymbol, f: &DiscreteSignal) -> Result<DiscreteSignal> {
    let grid = *f.grid();
    let d = grid.d;
    a.validate(d)?;
    let n = grid.n;
    let h = grid.h();
    let half = grid.half_width;
    let nyq = grid.nyquist();
    let dxi = grid.freq_step();
    let shape = grid.shape();
    let len = grid.len();
    let m_count = (2 * n - 1).pow(d as u32);
    let kernel_scale = dxi.powi(d as i32) * grid.cell();

    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let mut row = vec![Complex64::new(0.0, 0.0); len];
    let mut z = vec![0.0; 2 * d];
    let mut s_idx = vec![0usize; d];
    let mut k_idx = vec![0usize; d];
    let mut i_idx = vec![0usize; d];
    for ms in 0..m_count {
        let mut rem = ms;
        for ax in (0..d).rev() {
            s_idx[ax] = rem % (2 * n - 1);
            rem /= 2 * n - 1;
            z[ax] = -half + s_idx[ax] as f64 * h / 2.0;
        }
        for (kf, r) in row.iter_mut().enumerate() {
            grid.multi_index(kf, &mut k_idx);
            for ax in 0..d {
                z[d + ax] = -nyq + k_idx[ax] as f64 * dxi;
            }
            // the unpaired Nyquist frequency stands for both ±n/(4L)
            let edges: Vec<usize> = (0..d).filter(|&ax| k_idx[ax] == 0).collect();
            if edges.is_empty() {
                *r = a.eval(&z);
            } else {
                let mut acc = Complex64::new(0.0, 0.0);
                for signs in 0..(1usize << edges.len()) {
                    for (b, &ax) in edges.iter().enumerate() {
                        z[d + ax] = if (signs >> b) & 1 == 1 { nyq } else { -nyq };
                    }
                    acc += a.eval(&z);
                }
                *r = acc / (1usize << edges.len()) as f64;
            }
        }
        if row.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            continue;
        }
        fft_nd(&mut row, &shape, true)?;
        // pairs (i, j) with i + j = s on every axis, lag ℓ = i − j
        let mut ranges = Vec::with_capacity(d);
        for ax in 0..d {
            let s = s_idx[ax];
            let lo = s.saturating_sub(n - 1);
            let hi = s.min(n - 1);
            ranges.push((lo, hi));
        }
        let count: usize = ranges.iter().map(|(lo, hi)| hi - lo + 1).product();
        for c in 0..count {
            let mut rem = c;
            let mut lag_flat = 0usize;
            let mut j_flat = 0usize;
            let mut i_flat = 0usize;
            let mut parity = 0i64;
            for ax in (0..d).rev() {
                let (lo, hi) = ranges[ax];
                let width = hi - lo + 1;
                i_idx[ax] = lo + rem % width;
                rem /= width;
            }
            for ax in 0..d {
                let i = i_idx[ax];
                let j = s_idx[ax] - i;
                let lag = i as i64 - j as i64;
                parity += lag;
                lag_flat = lag_flat * n + lag.rem_euclid(n as i64) as usize;
                j_flat = j_flat * n + j;
                i_flat = i_flat * n + i;
            }
            let sign = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            out[i_flat] += row[lag_flat] * f.samples()[j_flat] * (sign * kernel_scale);
        }
    }
    DiscreteSignal::new(grid, out)
}

/// Phase-aligned relative L² difference between `(a∘S)ʷf` and
/// `μ(S)⁻¹ aʷ μ(S) f`.
pub fn symplectic_covariance_check(s: &SymplecticMatrix, a: &WeylSymbol, f: &DiscreteSignal) -> Result<f64> {
    let lhs = weyl_apply(&a.clone().compose(s), f)?;
    let op = MetaplecticOperator::new(s.clone())?;
    let inv = op.inverse()?;
    let rhs = inv.apply(&weyl_apply(a, &op.apply(f)?)?)?;
    phase_aligned_error(&lhs, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gaussian_window, GridSpec};
    use crate::symplectic::free_particle_flow;

    fn grid() -> GridSpec {
        GridSpec::new(1, 256, 8.0).unwrap()
    }

    fn test_signal() -> DiscreteSignal {
        gaussian_window(grid()).tf_shift(&[0.5], &[0.75], true).unwrap()
    }

    #[test]
    fn constant_and_coordinate() {
        let f = test_signal();
        let id = weyl_apply(&WeylSymbol::Constant(Complex64::new(1.0, 0.0)), &f).unwrap();
        assert!(id.sub(&f).unwrap().max_abs() < 1e-12);
        let x = weyl_apply(&WeylSymbol::Coordinate { axis: 0 }, &f).unwrap();
        let expected = f.map(|y, v| v * y[0]);
        assert!(x.sub(&expected).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn momentum_is_derivative() {
        // ξʷ = (2πi)⁻¹ d/dx
        let f = gaussian_window(grid());
        let p = weyl_apply(&WeylSymbol::Coordinate { axis: 1 }, &f).unwrap();
        let expected = f.map(|y, v| v * (-2.0 * PI * y[0]) / Complex64::new(0.0, 2.0 * PI));
        let e = p.sub(&expected).unwrap().max_abs();
        assert!(e < 1e-8, "{e}");
    }

    #[test]
    fn gaussian_symbol_matches_double_quadrature() {
        let f = gaussian_window(grid());
        let a = WeylSymbol::standard_gaussian(1);
        let out = weyl_apply(&a, &f).unwrap();
        let g = grid();
        let h = g.h();
        let oracle = DiscreteSignal::from_fn(g, |x| {
            let v: f64 = (0..g.n)
                .map(|j| {
                    let y = g.coord(j);
                    let m = (x[0] + y) / 2.0;
                    (-PI * m * m).exp() * (-PI * (x[0] - y).powi(2)).exp() * (-PI * y * y).exp()
                })
                .sum();
            Complex64::new(v * h, 0.0)
        });
        assert!(out.sub(&oracle).unwrap().max_abs() < 1e-6);
    }

    #[test]
    fn real_symbol_is_self_adjoint() {
        let a = WeylSymbol::Gaussian { center: vec![0.3, -0.2], width: 1.5, amplitude: 2.0 };
        let f = test_signal();
        let g = gaussian_window(grid()).tf_shift(&[-1.0], &[0.25], true).unwrap();
        let lhs = weyl_apply(&a, &f).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&weyl_apply(&a, &g).unwrap()).unwrap();
        assert!((lhs - rhs).norm() <= 1e-6 * f.norm() * g.norm());
    }

    #[test]
    fn sampled_symbol_interpolates() {
        let axes = vec![Axis::new(-1.0, 1.0, 3), Axis::new(-1.0, 1.0, 3)];
        let values: Vec<Complex64> = (0..9).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let a = WeylSymbol::Sampled { axes, values };
        assert_eq!(a.eval(&[0.0, 0.0]), Complex64::new(4.0, 0.0));
        assert!((a.eval(&[0.5, 0.5]).re - 6.0).abs() < 1e-12);
        assert_eq!(a.eval(&[2.0, 0.0]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn covariance_examples() {
        let f = gaussian_window(GridSpec::new(1, 512, 8.0).unwrap());
        let a = WeylSymbol::standard_gaussian(1);
        assert!(symplectic_covariance_check(&SymplecticMatrix::identity(1), &a, &f).unwrap() < 1e-10);
        assert!(symplectic_covariance_check(&SymplecticMatrix::j(1), &a, &f).unwrap() < 1e-5);
        let shifted = WeylSymbol::Gaussian { center: vec![0.5, -0.25], width: 1.0, amplitude: 1.0 };
        let e = symplectic_covariance_check(&free_particle_flow(0.5, 1), &shifted, &f).unwrap();
        assert!(e < 1e-4, "{e}");
    }
}
