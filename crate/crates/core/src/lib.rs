//! Joint nonideal quantum measurements.
//!
//! The crate models measurements as positive operator-valued measures and
//! works through three connected settings:
//!
//! - [`whichway`]: a beam splitter routing a photon to one of two
//!   polarization analyzers, read out as a bivariate POVM whose marginals are
//!   nonideal versions of two incompatible polarization observables.
//! - [`infometrics`]: the average-row-entropy nonideality measure, the
//!   Martens lower bound on the sum of the two entropies, and the Heisenberg
//!   dispersion relation for comparison.
//! - [`bell`]: two which-way arms on a photon pair. A single generalized run
//!   yields one 16-outcome distribution (so every CHSH combination of its
//!   marginals obeys `|S| ≤ 2`), while the four Aspect corner runs pooled
//!   together can reach `2√2`.
//!
//! [`sampler`] turns any of these into reproducible event logs.

pub mod bell;
pub mod error;
pub mod infometrics;
pub mod measurement;
pub mod qcore;
pub mod random;
pub mod sampler;
pub mod whichway;

pub use error::{Error, Result};
pub use num_complex::Complex64;
