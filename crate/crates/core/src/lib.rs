//! Numerical laboratory for holomorphic widths on explicit condensers.
//!
//! A condenser is a pair `(K, D)` of a compact set `K` inside a domain `D` in
//! ℂⁿ. For the explicit families handled here (polydiscs, annuli, monomial
//! polyhedra) this crate computes, by independent routes,
//!
//! * the Kolmogorov widths of the restriction maps `H²(D) → L²(K)` and
//!   certified brackets for the sup-norm widths of `H^∞(D) → A(K)`,
//! * the spectra of Toeplitz operators with indicator symbols on weighted
//!   Bergman spaces, their traces, and their eigenvalue concentration,
//! * weighted Bergman kernels on the diagonal,
//! * relative capacities (closed form, sublevel scaling, planar finite
//!   differences),
//! * the finite-rank Bergman–Weil approximants of the restriction map and
//!   their error bounds,
//!
//! so that the asymptotic slope of `-log d_m` against `m^{1/n}` can be
//! compared with `2π (n!/C(K,D))^{1/n}`.

// NaN must fail parameter checks, hence `!(x > 0.0)` rather than `x <= 0.0`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature node tables are kept at published precision.
#![allow(clippy::excessive_precision)]

pub mod bergman;
pub mod bergmanweil;
pub mod capacity;
pub mod error;
pub mod multiindex;
pub mod quad;
pub mod special;
pub mod toeplitz;
pub mod widths;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Largest supported dimension of ℂⁿ.
pub const MAX_DIM: usize = 8;
