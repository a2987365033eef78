//! Metaplectic operators, short-time Fourier analysis and empirical checks of
//! Gabor-matrix envelopes in which sparsity, wave-packet spreading and
//! dispersion show up together.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and parallel sweeps live in the `mpgabor` companion crate.
//!
//! Layout:
//!
//! - [`linalg`], [`symplectic`]: dense real matrices, the symplectic group,
//!   Euler decompositions and generator factorizations.
//! - [`signal`], [`phase`], [`tf`]: sampled signals on truncated grids, the
//!   STFT, the Wigner distribution and modulation-space norms.
//! - [`metaplectic`], [`weyl`], [`gabor`]: operators acting on signals and
//!   their Gabor matrices.
//! - [`verify`]: envelope constants, dispersion fits, convolution-lemma
//!   sweeps, cone propagation and norm growth.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fft;
pub mod gabor;
pub mod linalg;
pub mod metaplectic;
pub mod phase;
pub mod quadrature;
pub mod signal;
pub mod symplectic;
pub mod tf;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use num_complex::Complex64;
pub use signal::{DiscreteSignal, GridSpec};
pub use symplectic::{EulerDecomposition, GeneratorFactorization, SymplecticMatrix};
