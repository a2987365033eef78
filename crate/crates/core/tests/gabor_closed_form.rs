//! Gabor matrices of metaplectic operators with Gaussian windows against
//! the closed form
//! `|⟨μ(S)π(z)g, π(w)g⟩| = 2^{d/2} det(2(I + (SSᵀ)⁻¹))^{−1/4} e^{−π ζᵀ(I + SSᵀ)⁻¹ ζ}`,
//! `ζ = w − Sz`.

use mpgabor_core::gabor::{gabor_matrix, OperatorHandle};
use mpgabor_core::phase::{Axis, PhaseGrid};
use mpgabor_core::signal::gaussian_window;
use mpgabor_core::symplectic::{free_particle_flow, random_symplectic};
use mpgabor_core::{GridSpec, SymplecticMatrix};
use nalgebra::{DMatrix, DVector};

fn closed_form(s: &SymplecticMatrix, w: &[f64], z: &[f64]) -> f64 {
    let n = s.matrix().rows();
    let m = DMatrix::from_row_slice(n, n, s.matrix().as_slice());
    let sst = &m * m.transpose();
    let id = DMatrix::<f64>::identity(n, n);
    let a = (&id + sst.clone().try_inverse().unwrap()) * 2.0;
    let b = (&id + sst).try_inverse().unwrap();
    let zeta = DVector::from_column_slice(w) - &m * DVector::from_column_slice(z);
    let q = (zeta.transpose() * b * &zeta)[(0, 0)];
    2f64.powf(n as f64 / 4.0) * a.determinant().powf(-0.25) * (-core::f64::consts::PI * q).exp()
}

fn check(s: SymplecticMatrix, tol: f64) {
    let grid = GridSpec::new(1, 1024, 32.0).unwrap();
    let g = gaussian_window(grid);
    let zs = PhaseGrid::from_points(1, vec![0.0, 0.0, 1.0, -0.5, -0.75, 1.25]).unwrap();
    let ws = PhaseGrid::lattice(1, vec![Axis::centered(0.0, 0.5, 8), Axis::centered(0.0, 0.5, 8)]).unwrap();
    let op = OperatorHandle::metaplectic(s.clone()).unwrap();
    let k = gabor_matrix(&op, &g, &g, &ws, &zs).unwrap();
    assert_eq!(k.len(), ws.len() * zs.len());
    for (w, z, v) in k.iter() {
        let exact = closed_form(&s, w, z);
        assert!((v.norm() - exact).abs() <= tol, "w={w:?} z={z:?}: {} vs {exact}", v.norm());
    }
}

#[test]
fn identity_is_gaussian_stft() {
    check(SymplecticMatrix::identity(1), 1e-10);
}

#[test]
fn free_particle_family() {
    for t in [0.5, 1.0, 3.0] {
        check(free_particle_flow(t, 1), 1e-8);
    }
}

#[test]
fn random_operators() {
    for seed in [3, 17, 99] {
        check(random_symplectic(seed, 1, 3.0).unwrap(), 1e-7);
    }
}
