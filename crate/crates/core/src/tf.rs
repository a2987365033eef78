//! Short-time Fourier transform, Wigner distribution and the phase-space
//! norms built on them.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::phase::{Axis, ConeSpec, PhaseField, PhaseGrid};
use crate::signal::{DiscreteSignal, GridSpec};

/// `f·conj(T_x g)`, the integrand of `V_g f(x, ·)` before the transform.
fn windowed(f: &DiscreteSignal, g: &DiscreteSignal, x: &[f64]) -> Result<DiscreteSignal> {
    let shifted = g.translate(x, true)?;
    let samples = f.samples().iter().zip(shifted.samples()).map(|(a, b)| a * b.conj()).collect();
    DiscreteSignal::new(*f.grid(), samples)
}

/// DFT indices (per axis) hit by frequency axes aligned with the grid, or
/// `None` when some axis is off the DFT lattice.
fn dft_indices(grid: &GridSpec, axes: &[Axis]) -> Option<Vec<Vec<usize>>> {
    let step = grid.freq_step();
    let n = grid.n as i64;
    axes.iter()
        .map(|a| {
            let s0 = (a.start + grid.nyquist()) / step;
            let ds = a.step / step;
            if (s0 - s0.round()).abs() > 1e-9 || (ds - ds.round()).abs() > 1e-9 {
                return None;
            }
            let (s0, ds) = (s0.round() as i64, ds.round() as i64);
            Some((0..a.count as i64).map(|k| (s0 + k * ds).rem_euclid(n) as usize).collect())
        })
        .collect()
}

/// `cellᵈ Σ_j u_j e^{−2πi y_j·ξ}` by direct summation.
fn direct_transform(u: &DiscreteSignal, xi: &[f64]) -> Complex64 {
    let grid = u.grid();
    let n = grid.n;
    let d = grid.d;
    let phases: Vec<Vec<Complex64>> =
        (0..d).map(|a| (0..n).map(|j| Complex64::cis(-2.0 * PI * grid.coord(j) * xi[a])).collect()).collect();
    let mut m = vec![0usize; d];
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, v) in u.samples().iter().enumerate() {
        grid.multi_index(i, &mut m);
        let mut p = *v;
        for a in 0..d {
            p *= phases[a][m[a]];
        }
        acc += p;
    }
    acc * grid.cell()
}

fn check_pair(f: &DiscreteSignal, g: &DiscreteSignal, pg: &PhaseGrid) -> Result<()> {
    f.grid().ensure_same(g.grid())?;
    if pg.dim() != f.grid().d {
        return Err(Error::dim("phase grid dimension differs from the signal dimension"));
    }
    Ok(())
}

/// Calls `visit(index, z, value)` for every point `z = (x, ξ)` of `pg`, with
/// `value` the transform of `row(x)` evaluated at `freq_factor·ξ`. Lattices
/// whose frequencies land on the DFT grid of the row use one FFT per `x`.
fn visit_rows(
    grid: &GridSpec,
    pg: &PhaseGrid,
    freq_factor: f64,
    mut row: impl FnMut(&[f64]) -> Result<DiscreteSignal>,
    mut visit: impl FnMut(usize, &[f64], Complex64),
) -> Result<()> {
    let d = grid.d;
    let mut z = vec![0.0; 2 * d];
    match pg.axes() {
        Some(axes) => {
            let (xa, xia) = axes.split_at(d);
            let nx: usize = xa.iter().map(|a| a.count).product();
            let nxi: usize = xia.iter().map(|a| a.count).product();
            // frequencies scaled by freq_factor must sit on the row's DFT grid
            let scaled: Vec<Axis> =
                xia.iter().map(|a| Axis::new(a.start * freq_factor, a.step * freq_factor, a.count)).collect();
            let mut row_grid = None;
            let mut aligned = None;
            let mut mi = vec![0usize; d];
            for ix in 0..nx {
                let mut rem = ix;
                for a in (0..d).rev() {
                    z[a] = xa[a].value(rem % xa[a].count);
                    rem /= xa[a].count;
                }
                let u = row(&z[..d])?;
                if row_grid.is_none() {
                    row_grid = Some(*u.grid());
                    aligned = dft_indices(u.grid(), &scaled);
                }
                let spec = aligned.as_ref().map(|_| u.fourier());
                let mut xi2 = vec![0.0; d];
                for ik in 0..nxi {
                    let mut rem = ik;
                    for a in (0..d).rev() {
                        mi[a] = rem % xia[a].count;
                        z[d + a] = xia[a].value(mi[a]);
                        rem /= xia[a].count;
                    }
                    let value = match (&aligned, &spec) {
                        (Some(idx), Some(spec)) => {
                            let flat = (0..d).fold(0, |acc, a| acc * u.grid().n + idx[a][mi[a]]);
                            spec.samples()[flat]
                        }
                        _ => {
                            for a in 0..d {
                                xi2[a] = z[d + a] * freq_factor;
                            }
                            direct_transform(&u, &xi2)
                        }
                    };
                    visit(ix * nxi + ik, &z, value);
                }
            }
        }
        None => {
            let mut cached: Option<(Vec<f64>, DiscreteSignal)> = None;
            let mut xi2 = vec![0.0; d];
            for i in 0..pg.len() {
                pg.point(i, &mut z);
                let reuse = matches!(&cached, Some((x, _)) if x[..] == z[..d]);
                if !reuse {
                    cached = Some((z[..d].to_vec(), row(&z[..d])?));
                }
                let u = &cached.as_ref().expect("filled above").1;
                for a in 0..d {
                    xi2[a] = z[d + a] * freq_factor;
                }
                visit(i, &z, direct_transform(u, &xi2));
            }
        }
    }
    Ok(())
}

/// Streams `V_g f(z)` for every point of `pg`.
pub fn stft_visit(
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    pg: &PhaseGrid,
    visit: impl FnMut(usize, &[f64], Complex64),
) -> Result<()> {
    check_pair(f, g, pg)?;
    visit_rows(f.grid(), pg, 1.0, |x| windowed(f, g, x), visit)
}

/// `V_g f(x, ξ) = ⟨f, M_ξ T_x g⟩` sampled on `pg`.
pub fn stft(f: &DiscreteSignal, g: &DiscreteSignal, pg: &PhaseGrid) -> Result<PhaseField> {
    let mut values = vec![Complex64::new(0.0, 0.0); pg.len()];
    stft_visit(f, g, pg, |i, _, v| values[i] = v)?;
    PhaseField::new(pg.clone(), values)
}

/// `W(f, g)(x, ξ) = ∫ e^{−2πiy·ξ} f(x + y/2) conj(g(x − y/2)) dy`.
///
/// With `y = 2b` this is `2ᵈ` times the transform at `2ξ` of
/// `b ↦ f(x+b)·conj(g(x−b))`, which is sampled exactly on a grid refined
/// by two.
pub fn wigner(f: &DiscreteSignal, g: &DiscreteSignal, pg: &PhaseGrid) -> Result<PhaseField> {
    check_pair(f, g, pg)?;
    let d = f.grid().d;
    let scale = 2f64.powi(d as i32);
    let mut values = vec![Complex64::new(0.0, 0.0); pg.len()];
    let row = |x: &[f64]| -> Result<DiscreteSignal> {
        let back: Vec<f64> = x.iter().map(|v| -v).collect();
        let fr = f.translate(&back, true)?.upsample(2)?;
        let gr = g.translate(&back, true)?.upsample(2)?.reflect();
        let samples = fr.samples().iter().zip(gr.samples()).map(|(a, b)| a * b.conj()).collect();
        DiscreteSignal::new(*fr.grid(), samples)
    };
    visit_rows(f.grid(), pg, 2.0, row, |i, _, v| values[i] = v * scale)?;
    PhaseField::new(pg.clone(), values)
}

/// `|⟨V_{g1}f1, V_{g2}f2⟩ − ⟨f1,f2⟩·conj(⟨g1,g2⟩)|` on the signal lattice.
pub fn moyal_check(f1: &DiscreteSignal, g1: &DiscreteSignal, f2: &DiscreteSignal, g2: &DiscreteSignal) -> Result<f64> {
    let grid = *f1.grid();
    for s in [g1, f2, g2] {
        grid.ensure_same(s.grid())?;
    }
    let pg = PhaseGrid::signal_lattice(&grid);
    let mut acc = Complex64::new(0.0, 0.0);
    let d = grid.d;
    let nx = grid.len();
    let mut x = vec![0.0; d];
    for ix in 0..nx {
        grid.point(ix, &mut x);
        let a = windowed(f1, g1, &x)?.fourier();
        let b = windowed(f2, g2, &x)?.fourier();
        acc += a.samples().iter().zip(b.samples()).map(|(p, q)| p * q.conj()).sum::<Complex64>();
    }
    let lhs = acc * pg.weight();
    let rhs = f1.inner(f2)? * g1.inner(g2)?.conj();
    Ok((lhs - rhs).norm())
}

/// Result of a restricted phase-space norm.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RestrictedNorm {
    pub value: f64,
    /// Number of lattice points that passed the filter.
    pub points: usize,
}

impl RestrictedNorm {
    /// Set when no lattice point passed the filter.
    pub fn is_empty(&self) -> bool {
        self.points == 0
    }
}

/// `(Σ_z |V_g f(z)|ᵖ v_s(z)ᵖ w)^{1/p}` over the points of `pg` accepted by
/// `filter`, with `w` the lattice weight; `p = ∞` takes the weighted max.
pub fn weighted_norm(
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    pg: &PhaseGrid,
    p: f64,
    s: f64,
    filter: impl Fn(&[f64]) -> bool,
) -> Result<RestrictedNorm> {
    if !(p >= 1.0) {
        return Err(Error::invalid("p must be at least 1"));
    }
    let mut acc = 0.0f64;
    let mut count = 0usize;
    stft_visit(f, g, pg, |_, z, v| {
        if !filter(z) {
            return;
        }
        count += 1;
        let val = v.norm() * if s == 0.0 { 1.0 } else { (1.0 + norm(z)).powf(s) };
        if p.is_infinite() {
            acc = acc.max(val);
        } else {
            acc += val.powf(p);
        }
    })?;
    let value = if p.is_infinite() { acc } else { (acc * pg.weight()).powf(1.0 / p) };
    Ok(RestrictedNorm { value, points: count })
}

/// `‖V_g f‖_{L^p_{v_s}}` on the signal lattice.
pub fn modulation_norm(f: &DiscreteSignal, g: &DiscreteSignal, p: f64, s: f64) -> Result<f64> {
    modulation_norm_on(f, g, p, s, &PhaseGrid::signal_lattice(f.grid()))
}

pub fn modulation_norm_on(f: &DiscreteSignal, g: &DiscreteSignal, p: f64, s: f64, pg: &PhaseGrid) -> Result<f64> {
    Ok(weighted_norm(f, g, pg, p, s, |_| true)?.value)
}

/// `‖V_g f‖_{Lᵖ(Γ)}` on the signal lattice, `Γ` given by `cone`.
pub fn cone_norm(f: &DiscreteSignal, g: &DiscreteSignal, cone: &ConeSpec, p: f64) -> Result<RestrictedNorm> {
    cone_norm_on(f, g, cone, p, &PhaseGrid::signal_lattice(f.grid()))
}

pub fn cone_norm_on(
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    cone: &ConeSpec,
    p: f64,
    pg: &PhaseGrid,
) -> Result<RestrictedNorm> {
    if cone.dim() != f.grid().d {
        return Err(Error::dim("cone dimension differs from the signal dimension"));
    }
    weighted_norm(f, g, pg, p, 0.0, |z| cone.contains(z))
}

/// Largest `| |W(f,g)(x,ξ)| − 2ᵈ|V_ǧ f(2x, 2ξ)| |` over the points of `pg`.
pub fn stft_wigner_residual(f: &DiscreteSignal, g: &DiscreteSignal, pg: &PhaseGrid) -> Result<f64> {
    let w = wigner(f, g, pg)?;
    let d = f.grid().d;
    let doubled: Vec<f64> = pg.points().iter().map(|c| 2.0 * c).collect();
    let v = stft(f, &g.reflect(), &PhaseGrid::from_points(d, doubled)?)?;
    let scale = 2f64.powi(d as i32);
    Ok(w.values().iter().zip(v.values()).map(|(a, b)| (a.norm() - scale * b.norm()).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::gaussian_window;

    fn grid() -> GridSpec {
        GridSpec::new(1, 256, 8.0).unwrap()
    }

    /// Dense direct sum of the defining integral with the window shifted
    /// analytically.
    fn stft_oracle(f: &DiscreteSignal, x: f64, xi: f64) -> Complex64 {
        let g = f.grid();
        let h = g.h();
        (0..g.n)
            .map(|j| {
                let y = g.coord(j);
                f.samples()[j] * (-PI * (y - x) * (y - x)).exp() * Complex64::cis(-2.0 * PI * y * xi)
            })
            .sum::<Complex64>()
            * h
    }

    #[test]
    fn stft_examples() {
        let g = gaussian_window(grid());
        let zero = DiscreteSignal::zeros(grid());
        let pg = PhaseGrid::from_points(1, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.37, -1.3]).unwrap();
        assert_eq!(stft(&zero, &g, &pg).unwrap().max_abs(), 0.0);
        let v = stft(&g, &g, &pg).unwrap();
        assert!((v.values()[0].norm() - 2f64.powf(-0.5)).abs() < 1e-8);
        let pts = pg.points();
        for (i, z) in pts.chunks(2).enumerate() {
            let exact = 2f64.powf(-0.5) * (-PI * (z[0] * z[0] + z[1] * z[1]) / 2.0).exp();
            assert!((v.values()[i].norm() - exact).abs() < 1e-6);
            assert!((v.values()[i] - stft_oracle(&g, z[0], z[1])).norm() < 1e-8);
        }
    }

    #[test]
    fn lattice_and_scattered_paths_agree() {
        let gr = GridSpec::new(1, 64, 4.0).unwrap();
        let g = gaussian_window(gr);
        let f = g.tf_shift(&[0.5], &[1.0], true).unwrap();
        let pg = PhaseGrid::signal_lattice_strided(&gr, 4, 2);
        let a = stft(&f, &g, &pg).unwrap();
        let b = stft(&f, &g, &PhaseGrid::from_points(1, pg.points()).unwrap()).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn wigner_of_gaussian() {
        let g = gaussian_window(grid());
        let pg = PhaseGrid::from_points(1, vec![0.0, 0.0, 0.5, 0.25, -0.3, 0.8]).unwrap();
        let w = wigner(&g, &g, &pg).unwrap();
        for (i, z) in pg.points().chunks(2).enumerate() {
            let exact = 2f64.sqrt() * (-2.0 * PI * (z[0] * z[0] + z[1] * z[1])).exp();
            assert!((w.values()[i] - Complex64::new(exact, 0.0)).norm() < 1e-8, "{i}");
        }
        let lat = PhaseGrid::lattice(1, vec![Axis::new(-1.0, 0.5, 5), Axis::new(-1.0, 1.0 / 16.0, 33)]).unwrap();
        let wl = wigner(&g, &g, &lat).unwrap();
        let ws = wigner(&g, &g, &PhaseGrid::from_points(1, lat.points()).unwrap()).unwrap();
        for (x, y) in wl.values().iter().zip(ws.values()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn wigner_covariance() {
        let g = gaussian_window(grid());
        let f = DiscreteSignal::from_fn(grid(), |y| Complex64::new(y[0] * (-PI * y[0] * y[0]).exp(), 0.0));
        let (x0, xi0) = (1.0, 0.5);
        let shifted = f.tf_shift(&[x0], &[xi0], true).unwrap();
        let pts = vec![1.0, 0.5, 1.5, 0.2, 0.3, 1.1];
        let moved: Vec<f64> = pts.chunks(2).flat_map(|z| [z[0] - x0, z[1] - xi0]).collect();
        let a = wigner(&shifted, &shifted, &PhaseGrid::from_points(1, pts).unwrap()).unwrap();
        let b = wigner(&f, &f, &PhaseGrid::from_points(1, moved).unwrap()).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-6);
        }
        let _ = g;
    }

    #[test]
    fn moyal_examples() {
        let g = gaussian_window(grid());
        assert!(moyal_check(&g, &g, &g, &g).unwrap() < 1e-6);
        let odd = DiscreteSignal::from_fn(grid(), |y| Complex64::new(y[0] * (-PI * y[0] * y[0]).exp(), 0.0));
        assert!(moyal_check(&g, &g, &odd, &g).unwrap() < 1e-12);
        let f = g.tf_shift(&[0.75], &[-0.5], true).unwrap().add(&odd).unwrap();
        let r = moyal_check(&f, &f, &f, &f).unwrap();
        assert!(r < 1e-6 * f.norm_sq().powi(2));
    }

    #[test]
    fn modulation_norm_examples() {
        let g = gaussian_window(grid());
        let f = g.tf_shift(&[1.0], &[0.5], false).unwrap();
        let m2 = modulation_norm(&f, &g, 2.0, 0.0).unwrap();
        assert!((m2 / (f.norm() * g.norm()) - 1.0).abs() < 1e-6);
        let m1 = modulation_norm(&f, &g, 1.0, 0.0).unwrap();
        let m1c = modulation_norm(&f.scale(Complex64::new(0.0, -3.0)), &g, 1.0, 0.0).unwrap();
        assert!((m1c - 3.0 * m1).abs() < 1e-10 * m1);
        assert!(modulation_norm(&f, &g, 0.5, 0.0).is_err());
    }

    #[test]
    fn cone_norm_examples() {
        let g = gaussian_window(grid());
        let full = ConeSpec::around_axis(1, 0, 3.14159, 0.0).unwrap();
        let c = cone_norm(&g, &g, &full, 1.0).unwrap();
        let m1 = modulation_norm(&g, &g, 1.0, 0.0).unwrap();
        // only the origin itself is dropped
        let origin = 2f64.powf(-0.5) * PhaseGrid::signal_lattice(&grid()).weight();
        assert!((m1 - c.value - origin).abs() < 1e-10);
        assert_eq!(c.points, 256 * 256 - 1);
        let along_x = ConeSpec::around_axis(1, 0, 0.2, 0.1).unwrap();
        let along_xi = ConeSpec::around_axis(1, 1, 0.2, 0.1).unwrap();
        let a = cone_norm(&g, &g, &along_x, 1.0).unwrap().value;
        let b = cone_norm(&g, &g, &along_xi, 1.0).unwrap().value;
        // the lattice is self-dual at L = 8, n = 256 and |V_g g| is radial
        assert!(a > 0.0 && (a - b).abs() <= 1e-6 * a);
        let far = ConeSpec::around_axis(1, 0, 0.1, 0.1).unwrap();
        let h = g.tf_shift(&[0.0], &[6.0], false).unwrap();
        assert!(cone_norm(&h, &g, &far, 1.0).unwrap().value < 1e-12);
    }

    #[test]
    fn stft_wigner_relation() {
        let g = gaussian_window(grid());
        let f = g.tf_shift(&[0.5], &[0.25], true).unwrap();
        let pg = PhaseGrid::from_points(1, vec![0.0, 0.0, 0.25, 0.1, -0.5, 0.3, 1.0, -0.75]).unwrap();
        assert!(stft_wigner_residual(&f, &g, &pg).unwrap() < 1e-6);
    }
}
