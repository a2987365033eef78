//! Point sets and sampled fields in phase space `ℝ²ᵈ`, and cones in it.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::signal::GridSpec;

/// Regular one-dimensional axis `start + k·step`, `k < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, count: usize) -> Self {
        Axis { start, step, count }
    }

    /// `count` points centered on `center` (the center itself is included).
    pub fn centered(center: f64, step: f64, half_count: usize) -> Self {
        Axis { start: center - half_count as f64 * step, step, count: 2 * half_count + 1 }
    }

    pub fn value(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
enum Layout {
    Points(Vec<f64>),
    /// Axes `x₁…x_d, ξ₁…ξ_d`, row-major with `ξ_d` fastest.
    Lattice(Vec<Axis>),
}

/// A nonempty set of phase-space points `z = (x, ξ)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseGrid {
    d: usize,
    layout: Layout,
}

impl PhaseGrid {
    /// Scattered points, `2d` coordinates each.
    pub fn from_points(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 || coords.is_empty() || coords.len() % (2 * d) != 0 {
            return Err(Error::dim("point list must be nonempty with 2d coordinates per point"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("phase points must be finite"));
        }
        Ok(PhaseGrid { d, layout: Layout::Points(coords) })
    }

    pub fn single(z: &[f64]) -> Result<Self> {
        if z.len() % 2 != 0 {
            return Err(Error::dim("phase point must have even length"));
        }
        Self::from_points(z.len() / 2, z.to_vec())
    }

    /// Tensor lattice from `2d` axes.
    pub fn lattice(d: usize, axes: Vec<Axis>) -> Result<Self> {
        if d == 0 || axes.len() != 2 * d {
            return Err(Error::dim("a lattice needs 2d axes"));
        }
        if axes.iter().any(|a| a.count == 0 || !(a.step > 0.0) || !a.start.is_finite()) {
            return Err(Error::invalid("lattice axes need positive counts and steps"));
        }
        Ok(PhaseGrid { d, layout: Layout::Lattice(axes) })
    }

    /// All signal positions times the full DFT frequency grid.
    pub fn signal_lattice(grid: &GridSpec) -> Self {
        Self::signal_lattice_strided(grid, 1, 1)
    }

    /// Every `x_stride`-th position times every `xi_stride`-th frequency.
    pub fn signal_lattice_strided(grid: &GridSpec, x_stride: usize, xi_stride: usize) -> Self {
        let xs = Axis::new(-grid.half_width, grid.h() * x_stride as f64, grid.n.div_ceil(x_stride));
        let xis = Axis::new(-grid.nyquist(), grid.freq_step() * xi_stride as f64, grid.n.div_ceil(xi_stride));
        let mut axes = vec![xs; grid.d];
        axes.extend(core::iter::repeat_n(xis, grid.d));
        PhaseGrid { d: grid.d, layout: Layout::Lattice(axes) }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        match &self.layout {
            Layout::Points(c) => c.len() / (2 * self.d),
            Layout::Lattice(axes) => axes.iter().map(|a| a.count).product(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axes(&self) -> Option<&[Axis]> {
        match &self.layout {
            Layout::Lattice(a) => Some(a),
            Layout::Points(_) => None,
        }
    }

    /// Quadrature weight per point: product of steps for lattices, one for
    /// scattered points.
    pub fn weight(&self) -> f64 {
        match &self.layout {
            Layout::Lattice(axes) => axes.iter().map(|a| a.step).product(),
            Layout::Points(_) => 1.0,
        }
    }

    pub fn point(&self, i: usize, out: &mut [f64]) {
        match &self.layout {
            Layout::Points(c) => out.copy_from_slice(&c[i * 2 * self.d..(i + 1) * 2 * self.d]),
            Layout::Lattice(axes) => {
                let mut rem = i;
                for a in (0..axes.len()).rev() {
                    out[a] = axes[a].value(rem % axes[a].count);
                    rem /= axes[a].count;
                }
            }
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len() * 2 * self.d];
        for (i, chunk) in out.chunks_mut(2 * self.d).enumerate() {
            self.point(i, chunk);
        }
        out
    }
}

/// Values attached to the points of a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseField {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl PhaseField {
    pub fn new(grid: PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::dim("value count does not match point count"));
        }
        Ok(PhaseField { grid, values })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Index and coordinates of the largest modulus.
    pub fn argmax(&self) -> (usize, Vec<f64>) {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, v)| if v.norm() > best.1 { (i, v.norm()) } else { best });
        let mut z = vec![0.0; 2 * self.grid.d];
        self.grid.point(i, &mut z);
        (i, z)
    }
}

/// A circular sector `{z : ∠(z, center) < half_angle}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sector {
    pub center: Vec<f64>,
    pub half_angle: f64,
}

/// Union of sectors with a ball around the origin removed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConeSpec {
    sectors: Vec<Sector>,
    inner_radius: f64,
}

impl ConeSpec {
    pub fn new(sectors: Vec<Sector>, inner_radius: f64) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::invalid("a cone needs at least one sector"));
        }
        let dim = sectors[0].center.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::dim("sector centers must live in ℝ²ᵈ"));
        }
        if !(inner_radius >= 0.0) {
            return Err(Error::invalid("inner radius must be nonnegative"));
        }
        let mut out = Vec::with_capacity(sectors.len());
        for s in sectors {
            if s.center.len() != dim {
                return Err(Error::dim("sector centers of different dimension"));
            }
            if !(s.half_angle > 0.0 && s.half_angle < core::f64::consts::PI) {
                return Err(Error::invalid("half angle must lie in (0, π)"));
            }
            let nc = norm(&s.center);
            if !(nc > 0.0) || !nc.is_finite() {
                return Err(Error::invalid("sector center must be a nonzero vector"));
            }
            out.push(Sector { center: s.center.iter().map(|c| c / nc).collect(), half_angle: s.half_angle });
        }
        Ok(ConeSpec { sectors: out, inner_radius })
    }

    /// Double sector around `±axis` in ℝ²ᵈ, half opening `half_angle`.
    pub fn around_axis(d: usize, axis: usize, half_angle: f64, inner_radius: f64) -> Result<Self> {
        if axis >= 2 * d {
            return Err(Error::dim("axis index out of range"));
        }
        let mut c = vec![0.0; 2 * d];
        c[axis] = 1.0;
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        Self::new(vec![Sector { center: c, half_angle }, Sector { center: neg, half_angle }], inner_radius)
    }

    pub fn dim(&self) -> usize {
        self.sectors[0].center.len() / 2
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn with_inner_radius(&self, r: f64) -> Self {
        ConeSpec { sectors: self.sectors.clone(), inner_radius: r.max(0.0) }
    }

    /// Membership ignoring the inner ball.
    pub fn contains_direction(&self, z: &[f64]) -> bool {
        let nz = norm(z);
        if nz == 0.0 {
            return false;
        }
        self.sectors.iter().any(|s| angle_between(&s.center, z, nz) < s.half_angle)
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        norm(z) >= self.inner_radius && self.contains_direction(z)
    }

    /// Whether every sector of `self`, widened by `margin`, fits inside one
    /// sector of `outer`.
    pub fn is_nested_in(&self, outer: &ConeSpec, margin: f64) -> bool {
        self.sectors.iter().all(|inner| {
            outer
                .sectors
                .iter()
                .any(|o| angle_between(&o.center, &inner.center, 1.0) + inner.half_angle + margin <= o.half_angle)
        })
    }
}

fn angle_between(unit: &[f64], z: &[f64], nz: f64) -> f64 {
    (dot(unit, z) / nz).clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_points_and_weights() {
        let g = GridSpec::new(1, 16, 2.0).unwrap();
        let pg = PhaseGrid::signal_lattice(&g);
        assert_eq!(pg.len(), 256);
        assert!((pg.weight() - g.h() * g.freq_step()).abs() < 1e-15);
        let mut z = [0.0; 2];
        pg.point(17, &mut z);
        assert_eq!(z, [g.coord(1), -g.nyquist() + g.freq_step()]);
        assert!(PhaseGrid::from_points(1, vec![0.0; 3]).is_err());
    }

    #[test]
    fn cone_membership() {
        let c = ConeSpec::around_axis(1, 0, 0.5, 0.1).unwrap();
        assert!(c.contains(&[1.0, 0.2]));
        assert!(c.contains(&[-1.0, 0.2]));
        assert!(!c.contains(&[0.0, 1.0]));
        assert!(!c.contains(&[0.05, 0.0]));
        let narrow = ConeSpec::around_axis(1, 0, 0.2, 0.1).unwrap();
        assert!(narrow.is_nested_in(&c, 0.1));
        assert!(!c.is_nested_in(&narrow, 0.0));
        assert!(ConeSpec::around_axis(1, 0, 4.0, 0.0).is_err());
    }

    #[test]
    fn argmax_finds_peak() {
        let pg = PhaseGrid::from_points(1, vec![0.0, 0.0, 1.0, 2.0]).unwrap();
        let f = PhaseField::new(pg, vec![Complex64::new(0.1, 0.0), Complex64::new(0.0, -3.0)]).unwrap();
        assert_eq!(f.argmax(), (1, vec![1.0, 2.0]));
    }
}
