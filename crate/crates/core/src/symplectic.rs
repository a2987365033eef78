//! The real symplectic group Sp(d, ℝ): membership tests, symplectic rotations,
//! the Euler (symplectic singular value) decomposition, the free-particle
//! flow and a factorization into chirps, rescalings and Fourier transforms.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Matrix};

/// Default tolerance for the symplectic condition and for reconstructions.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Relative gap under which eigenvalues of `SSᵀ` are treated as one cluster.
const CLUSTER_GAP: f64 = 1e-8;

/// Invertibility threshold used by [`free_factorization`], relative to ‖S‖₂.
const INVERTIBILITY_THRESHOLD: f64 = 1e-6;

/// The 2d × 2d matrix `[[O, I], [−I, O]]`.
pub fn standard_j(d: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = 1.0;
        j[(d + i, i)] = -1.0;
    }
    j
}

fn even_square(m: &Matrix) -> Result<usize> {
    if !m.is_square() || m.rows() % 2 != 0 {
        return Err(Error::dim(format!(
            "expected a square matrix of even size, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.rows() / 2)
}

/// `‖mᵀJm − J‖_max`.
pub fn symplectic_residual(m: &Matrix) -> Result<f64> {
    let d = even_square(m)?;
    let j = standard_j(d);
    Ok((&(&m.transpose() * &j) * m).max_abs_diff(&j))
}

/// `‖mᵀm − I‖_max`.
pub fn orthogonality_residual(m: &Matrix) -> f64 {
    (&m.transpose() * m).max_abs_diff(&Matrix::identity(m.cols()))
}

pub fn is_symplectic(m: &Matrix, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(m)? <= tol)
}

pub fn is_symplectic_rotation(m: &Matrix, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(m)? <= tol && orthogonality_residual(m) <= tol)
}

/// A validated element of Sp(d, ℝ).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymplecticMatrix {
    d: usize,
    m: Matrix,
}

impl SymplecticMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_TOL)
    }

    pub fn with_tolerance(m: Matrix, tol: f64) -> Result<Self> {
        let d = even_square(&m)?;
        let residual = symplectic_residual(&m)?;
        if residual > tol {
            return Err(Error::invalid(format!(
                "matrix is not symplectic: ‖SᵀJS − J‖_max = {residual:e} > {tol:e}"
            )));
        }
        Ok(SymplecticMatrix { d, m })
    }

    /// Wraps a matrix known to be symplectic by construction.
    pub(crate) fn from_trusted(m: Matrix) -> Self {
        let d = m.rows() / 2;
        SymplecticMatrix { d, m }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_trusted(Matrix::identity(2 * d))
    }

    pub fn j(d: usize) -> Self {
        Self::from_trusted(standard_j(d))
    }

    /// `[[I, O], [C, I]]` for symmetric `c`.
    pub fn chirp(c: &Matrix) -> Result<Self> {
        if !c.is_symmetric(1e-12 * c.max_abs().max(1.0)) {
            return Err(Error::invalid("chirp matrix must be symmetric"));
        }
        let d = c.rows();
        let i = Matrix::identity(d);
        Ok(Self::from_trusted(Matrix::from_blocks(&i, &Matrix::zeros(d, d), &c.symmetrized(), &i)?))
    }

    /// `[[M, O], [O, M⁻ᵀ]]` for invertible `m`.
    pub fn scaling(m: &Matrix) -> Result<Self> {
        let d = m.rows();
        let inv_t = m.inverse()?.transpose();
        Ok(Self::from_trusted(Matrix::from_blocks(m, &Matrix::zeros(d, d), &Matrix::zeros(d, d), &inv_t)?))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    /// The d × d blocks `(A, B, C, D)` of `[[A, B], [C, D]]`.
    pub fn blocks(&self) -> (Matrix, Matrix, Matrix, Matrix) {
        let d = self.d;
        (self.m.block(0, 0, d, d), self.m.block(0, d, d, d), self.m.block(d, 0, d, d), self.m.block(d, d, d, d))
    }

    /// `S⁻¹ = −J Sᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = standard_j(self.d);
        Self::from_trusted((&(&j * &self.m.transpose()) * &j).scale(-1.0))
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::dim("symplectic matrices of different dimension"));
        }
        Ok(Self::from_trusted(&self.m * &other.m))
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        self.m.mul_vec(z)
    }
}

/// `[[A, −B], [B, A]]`, the real form of the unitary `A + iB`.
pub fn rotation_from_unitary(a: &Matrix, b: &Matrix) -> Result<SymplecticMatrix> {
    let d = a.rows();
    if !a.is_square() || b.rows() != d || b.cols() != d {
        return Err(Error::dim("A and B must be square of the same size"));
    }
    let gram = (&(a * &a.transpose())).add(&(b * &b.transpose()));
    let skew = (b * &a.transpose()).sub(&(a * &b.transpose()));
    let residual = gram.max_abs_diff(&Matrix::identity(d)).max(skew.max_abs());
    if residual > DEFAULT_TOL {
        return Err(Error::invalid(format!("A + iB is not unitary (residual {residual:e})")));
    }
    let m = Matrix::from_blocks(a, &b.scale(-1.0), b, a)?;
    Ok(SymplecticMatrix::from_trusted(m))
}

/// `(D, D′, D″) = (Σ ⊕ Σ⁻¹, Σ⁻¹ ⊕ I, I ⊕ Σ⁻¹)`.
pub fn dilation_matrices(sigma: &[f64]) -> Result<(Matrix, Matrix, Matrix)> {
    if sigma.is_empty() {
        return Err(Error::dim("sigma must be nonempty"));
    }
    if sigma.iter().any(|&s| !(s >= 1.0) || !s.is_finite()) {
        return Err(Error::invalid("singular values must satisfy σ ≥ 1"));
    }
    if sigma.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid("singular values must be in descending order"));
    }
    let inv: Vec<f64> = sigma.iter().map(|s| 1.0 / s).collect();
    let ones = vec![1.0; sigma.len()];
    let cat = |a: &[f64], b: &[f64]| Matrix::diag(&[a, b].concat());
    Ok((cat(sigma, &inv), cat(&inv, &ones), cat(&ones, &inv)))
}

/// An Euler decomposition `S = UᵀDV` with `U`, `V` symplectic rotations.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EulerDecomposition {
    u: Matrix,
    v: Matrix,
    sigma: Vec<f64>,
}

impl EulerDecomposition {
    /// Assembles a decomposition from its parts and checks every invariant
    /// against `s` with tolerance `tol`.
    pub fn from_parts(u: Matrix, v: Matrix, sigma: Vec<f64>, s: &SymplecticMatrix, tol: f64) -> Result<Self> {
        dilation_matrices(&sigma)?;
        let dec = EulerDecomposition { u, v, sigma };
        dec.check(s, tol)?;
        Ok(dec)
    }

    fn check(&self, s: &SymplecticMatrix, tol: f64) -> Result<()> {
        let residual = self.reconstruction_residual(s);
        let rot = self.rotation_residual();
        if residual > tol || rot > tol {
            return Err(Error::Decomposition {
                reason: format!("reconstruction {residual:e}, rotation residual {rot:e}, tolerance {tol:e}"),
                residual: residual.max(rot),
            });
        }
        Ok(())
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn det_sigma(&self) -> f64 {
        self.sigma.iter().product()
    }

    pub fn d(&self) -> Matrix {
        dilation_matrices(&self.sigma).expect("validated sigma").0
    }

    pub fn d_prime(&self) -> Matrix {
        dilation_matrices(&self.sigma).expect("validated sigma").1
    }

    pub fn d_double_prime(&self) -> Matrix {
        dilation_matrices(&self.sigma).expect("validated sigma").2
    }

    /// `D′U`, the dilation that appears in the refined envelope.
    pub fn spreading(&self) -> Matrix {
        &self.d_prime() * &self.u
    }

    pub fn reconstruct(&self) -> Matrix {
        &(&self.u.transpose() * &self.d()) * &self.v
    }

    pub fn reconstruction_residual(&self, s: &SymplecticMatrix) -> f64 {
        self.reconstruct().max_abs_diff(s.matrix())
    }

    /// Largest symplectic or orthogonality residual of `U` and `V`.
    pub fn rotation_residual(&self) -> f64 {
        [&self.u, &self.v]
            .iter()
            .map(|m| symplectic_residual(m).unwrap_or(f64::INFINITY).max(orthogonality_residual(m)))
            .fold(0.0, f64::max)
    }
}

pub fn euler_decompose(s: &SymplecticMatrix) -> Result<EulerDecomposition> {
    euler_decompose_with_tol(s, DEFAULT_TOL)
}

/// Euler decomposition through the eigenvectors of `P = SSᵀ`.
///
/// Eigenvalues of `P` come in pairs `(σ², σ⁻²)` and `J` maps the σ²
/// eigenspace onto the σ⁻² one, so only the eigenvectors of the upper half
/// are used; their partners are taken as `−Jx`. Inside the eigenvalue-one
/// cluster the pairing is built by a symplectic Gram–Schmidt step.
pub fn euler_decompose_with_tol(s: &SymplecticMatrix, tol: f64) -> Result<EulerDecomposition> {
    let d = s.dim();
    let n = 2 * d;
    let j = standard_j(d);
    let p = (s.matrix() * &s.matrix().transpose()).symmetrized();
    let eig = p.symmetric_eigen()?;

    let k_big = (0..d).filter(|&i| eig.values[i] > 1.0 + CLUSTER_GAP).count();
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(d);

    let project_out = |v: &[f64], xs: &[Vec<f64>]| -> Vec<f64> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for x in xs {
                let jx = j.mul_vec(x);
                let a = dot(&r, x);
                let b = dot(&r, &jx);
                for k in 0..n {
                    r[k] -= a * x[k] + b * jx[k];
                }
            }
        }
        r
    };

    for i in 0..k_big {
        let r = project_out(&eig.vectors.column(i), &xs);
        let nr = norm(&r);
        if nr < 0.5 {
            return Err(Error::Decomposition {
                reason: format!("eigenvector {i} collapsed under symplectic pairing"),
                residual: 1.0 - nr,
            });
        }
        xs.push(r.iter().map(|v| v / nr).collect());
    }

    let mut unused: Vec<usize> = (k_big..n - k_big).collect();
    while xs.len() < d {
        let (pos, r) = unused
            .iter()
            .enumerate()
            .map(|(pos, &c)| (pos, project_out(&eig.vectors.column(c), &xs)))
            .max_by(|a, b| norm(&a.1).total_cmp(&norm(&b.1)))
            .ok_or_else(|| Error::Decomposition {
                reason: "ran out of eigenvectors in the unit cluster".into(),
                residual: f64::INFINITY,
            })?;
        unused.remove(pos);
        let nr = norm(&r);
        xs.push(r.iter().map(|v| v / nr).collect());
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = xs
        .into_iter()
        .map(|x| {
            let rayleigh = dot(&x, &p.mul_vec(&x));
            (rayleigh.max(1.0).sqrt(), x)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut w = Matrix::zeros(n, n);
    for (k, (_, x)) in pairs.iter().enumerate() {
        w.set_column(k, x);
        let partner: Vec<f64> = j.mul_vec(x).iter().map(|v| -v).collect();
        w.set_column(d + k, &partner);
    }
    let sigma: Vec<f64> = pairs.iter().map(|(sg, _)| *sg).collect();
    let u = w.transpose();
    let (dmat, _, _) = dilation_matrices(&sigma)?;
    let dinv = Matrix::diag(&(0..n).map(|i| 1.0 / dmat[(i, i)]).collect::<Vec<_>>());
    let v = &(&dinv * &u) * s.matrix();
    let dec = EulerDecomposition { u, v, sigma };
    dec.check(s, tol)?;
    Ok(dec)
}

/// The free-particle flow `[[I, 2tI], [O, I]]`.
pub fn free_particle_flow(t: f64, d: usize) -> SymplecticMatrix {
    let i = Matrix::identity(d);
    let m = Matrix::from_blocks(&i, &i.scale(2.0 * t), &Matrix::zeros(d, d), &i).expect("square blocks");
    SymplecticMatrix::from_trusted(m)
}

/// Largest singular value of the free-particle flow, `√(1+t²) + |t|`.
pub fn free_particle_sigma(t: f64) -> f64 {
    (1.0 + t * t).sqrt() + t.abs()
}

/// Closed-form Euler decomposition of the free-particle flow.
///
/// For `t ≥ 0`, `U = c[[σI, I], [−I, σI]]` and `V = c[[I, σI], [−σI, I]]`
/// with `c = (1+σ²)^{−1/2}`. Negative times conjugate both factors by the
/// frequency reflection `R = I ⊕ (−I)`, using `S₋ₜ = R Sₜ R` and `RDR = D`.
pub fn free_particle_euler(t: f64, d: usize) -> Result<EulerDecomposition> {
    let sg = free_particle_sigma(t);
    let c = 1.0 / (1.0 + sg * sg).sqrt();
    let i = Matrix::identity(d);
    let mut u = Matrix::from_blocks(&i.scale(sg * c), &i.scale(c), &i.scale(-c), &i.scale(sg * c))?;
    let mut v = Matrix::from_blocks(&i.scale(c), &i.scale(sg * c), &i.scale(-sg * c), &i.scale(c))?;
    if t < 0.0 {
        let r = Matrix::diag(&[vec![1.0; d], vec![-1.0; d]].concat());
        u = &(&r * &u) * &r;
        v = &(&r * &v) * &r;
    }
    EulerDecomposition::from_parts(u, v, vec![sg; d], &free_particle_flow(t, d), DEFAULT_TOL)
}

/// Haar-distributed unitary, returned as its real and imaginary parts.
fn haar_unitary(rng: &mut ChaCha8Rng, d: usize) -> (Matrix, Matrix) {
    // complex Gram–Schmidt on Gaussian columns
    let mut cols: Vec<Vec<(f64, f64)>> = (0..d)
        .map(|_| (0..d).map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
        .collect();
    for k in 0..d {
        for _ in 0..2 {
            for prev in 0..k {
                // <q_prev, c_k> with conjugation on q_prev
                let (mut re, mut im) = (0.0, 0.0);
                for i in 0..d {
                    let (qr, qi) = cols[prev][i];
                    let (cr, ci) = cols[k][i];
                    re += qr * cr + qi * ci;
                    im += qr * ci - qi * cr;
                }
                for i in 0..d {
                    let (qr, qi) = cols[prev][i];
                    cols[k][i].0 -= re * qr - im * qi;
                    cols[k][i].1 -= re * qi + im * qr;
                }
            }
        }
        let nrm = cols[k].iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        for e in cols[k].iter_mut() {
            e.0 /= nrm;
            e.1 /= nrm;
        }
    }
    let mut a = Matrix::zeros(d, d);
    let mut b = Matrix::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        for (i, &(re, im)) in col.iter().enumerate() {
            a[(i, j)] = re;
            b[(i, j)] = im;
        }
    }
    (a, b)
}

/// A random symplectic matrix `UᵀDV` with Haar-random rotations and
/// singular values drawn log-uniformly in `[1, sigma_max]`.
pub fn random_symplectic(seed: u64, d: usize, sigma_max: f64) -> Result<SymplecticMatrix> {
    Ok(random_symplectic_with_sigma(seed, d, sigma_max)?.0)
}

/// Same as [`random_symplectic`], also returning the singular values used.
pub fn random_symplectic_with_sigma(seed: u64, d: usize, sigma_max: f64) -> Result<(SymplecticMatrix, Vec<f64>)> {
    if d == 0 {
        return Err(Error::dim("d must be positive"));
    }
    if !(sigma_max >= 1.0) || !sigma_max.is_finite() {
        return Err(Error::invalid("sigma_max must be a finite number ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ua, ub) = haar_unitary(&mut rng, d);
    let (va, vb) = haar_unitary(&mut rng, d);
    let u = rotation_from_unitary(&ua, &ub)?;
    let v = rotation_from_unitary(&va, &vb)?;
    let log_max = sigma_max.ln();
    let mut sigma: Vec<f64> = (0..d).map(|_| (rng.random::<f64>() * log_max).exp()).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let (dm, _, _) = dilation_matrices(&sigma)?;
    let s = &(&u.matrix().transpose() * &dm) * v.matrix();
    Ok((SymplecticMatrix::from_trusted(s), sigma))
}

/// One elementary factor of a [`GeneratorFactorization`].
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `[[I, O], [C, I]]`.
    Chirp(Matrix),
    /// `J`.
    Fourier,
    /// `[[M, O], [O, M⁻ᵀ]]`.
    Scaling(Matrix),
}

impl Generator {
    pub fn symplectic(&self, d: usize) -> Result<SymplecticMatrix> {
        match self {
            Generator::Chirp(c) => SymplecticMatrix::chirp(c),
            Generator::Fourier => Ok(SymplecticMatrix::j(d)),
            Generator::Scaling(m) => SymplecticMatrix::scaling(m),
        }
    }
}

/// `S = 𝒞(P)·Scale(M)·J·𝒞(Q)`, optionally followed on the right by
/// `J·𝒞(−λI)` when the upper-right block of `S` is not invertible.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneratorFactorization {
    pub lambda: f64,
    pub pre_chirp: Matrix,
    pub post_chirp: Matrix,
    pub scaling: Matrix,
    pub ft_count: usize,
}

impl GeneratorFactorization {
    pub fn dim(&self) -> usize {
        self.scaling.rows()
    }

    /// Factors in the order they act on a function (rightmost first).
    pub fn generators(&self) -> Vec<Generator> {
        let d = self.dim();
        let mut out = Vec::with_capacity(6);
        if self.ft_count == 2 {
            out.push(Generator::Chirp(Matrix::identity(d).scale(-self.lambda)));
            out.push(Generator::Fourier);
        }
        out.push(Generator::Chirp(self.pre_chirp.clone()));
        out.push(Generator::Fourier);
        out.push(Generator::Scaling(self.scaling.clone()));
        out.push(Generator::Chirp(self.post_chirp.clone()));
        out
    }

    pub fn recompose(&self) -> Result<Matrix> {
        let d = self.dim();
        let mut acc = Matrix::identity(2 * d);
        for g in self.generators() {
            acc = g.symplectic(d)?.matrix() * &acc;
        }
        Ok(acc)
    }
}

fn smallest_singular_value(m: &Matrix) -> f64 {
    m.singular_values().last().copied().unwrap_or(0.0)
}

/// Blocks `(a, b, d)` with `b` invertible give `P = DB⁻¹`, `Q = B⁻¹A`.
fn direct_factors(a: &Matrix, b: &Matrix, dd: &Matrix) -> Result<(Matrix, Matrix)> {
    let binv = b.inverse()?;
    Ok(((dd * &binv).symmetrized(), (&binv * a).symmetrized()))
}

/// Factorization of `S` into chirps, one rescaling and one or two Fourier
/// transforms.
pub fn free_factorization(s: &SymplecticMatrix) -> Result<GeneratorFactorization> {
    free_factorization_with_tol(s, DEFAULT_TOL)
}

pub fn free_factorization_with_tol(s: &SymplecticMatrix, tol: f64) -> Result<GeneratorFactorization> {
    let (a, b, c, dd) = s.blocks();
    let threshold = INVERTIBILITY_THRESHOLD * s.matrix().spectral_norm();
    let mut smallest = smallest_singular_value(&b);
    let fact = if smallest >= threshold {
        let (p, q) = direct_factors(&a, &b, &dd)?;
        GeneratorFactorization { lambda: 0.0, pre_chirp: q, post_chirp: p, scaling: b, ft_count: 1 }
    } else {
        let mut found = None;
        'search: for k in (0..=20).rev() {
            for sign in [1.0, -1.0] {
                let lambda = sign * (-(k as f64)).exp2();
                // S·𝒞(λI)·J⁻¹ = [[B, −(A+λB)], [D, −(C+λD)]]
                let b2 = a.add(&b.scale(lambda)).scale(-1.0);
                let sv = smallest_singular_value(&b2);
                smallest = smallest.max(sv);
                if sv >= threshold {
                    found = Some((lambda, b2));
                    break 'search;
                }
            }
        }
        let Some((lambda, b2)) = found else {
            return Err(Error::Factorization { smallest_singular_value: smallest });
        };
        let d2 = c.add(&dd.scale(lambda)).scale(-1.0);
        let (p, q) = direct_factors(&b, &b2, &d2)?;
        GeneratorFactorization { lambda, pre_chirp: q, post_chirp: p, scaling: b2, ft_count: 2 }
    };
    let residual = fact.recompose()?.max_abs_diff(s.matrix());
    let scale = s.matrix().max_abs().max(1.0);
    if residual > tol * scale {
        return Err(Error::Decomposition { reason: "generator recomposition does not reproduce S".into(), residual });
    }
    Ok(fact)
}
