//! Numerical laboratory for Schrödinger operators with delta interactions
//! at the positive integers,
//!
//! ```text
//! H = -d²/dx² + Σ_n V(n) δ(x - n)   on [0, ∞) with a Dirichlet condition at 0.
//! ```
//!
//! At a fixed wavenumber `k` the operator reduces to the tridiagonal matrix
//! `J_k` with diagonal `b_n = 2cos k + (sin k / k) V(n)` and off-diagonal `-1`.
//! Everything in this crate is built on that reduction:
//!
//! - [`potentials`]: coupling sequences, Fourier sums, the seeded random model.
//! - [`lattice`]: the Jacobi coefficients, free resolvent kernels and half-line solves.
//! - [`jost`]: Jost solutions, scattering coefficients and the Weyl m-function.
//! - [`determinant`]: perturbation determinants, `det₄` and line bound states.
//! - [`bounds`]: Birman–Schwinger operators and Lieb–Thirring sums.
//! - [`trace_entropy`]: the weighted `log(k / 4 Im M)` functional and trace inequality.
//! - [`random_spectra`]: band geometry and Prüfer analysis of the decaying random model.

pub mod bounds;
pub mod determinant;
mod error;
pub mod jost;
pub mod lattice;
pub mod potentials;
pub mod quadrature;
pub mod random_spectra;
mod roots;
pub mod trace_entropy;

pub use error::{Error, Result};
pub use lattice::Wavenumber;
pub use potentials::{Potential, RandomModel};
