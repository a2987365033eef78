//! Empirical checks of the envelope, dispersion, convolution, cone and
//! norm-growth estimates.
//!
//! Every check is a pure function of its inputs. Sweeps are split into
//! per-item functions so callers can run items in parallel and assemble the
//! results in item order.

pub mod lemmas;
pub mod envelope;
pub mod boxstretch;
pub mod cone;
pub mod dispersion;
pub mod norms;
