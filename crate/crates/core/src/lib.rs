//! Spectral toolkit for complex-symmetric Jacobi matrices of Gribov type.
//!
//! The central object is the tridiagonal matrix with diagonal `β_k = μ·k` and
//! off-diagonal `α_k = iλ·k·√(k+1)` (both off-diagonals equal, so the matrix is
//! complex symmetric rather than Hermitian). The crate provides:
//!
//! * coefficient families — the Gribov family plus classical families
//!   (Laguerre, ultraspherical, Jacobi) continued to parameter ranges where the
//!   recurrence coefficients become imaginary ([`coefficients`]);
//! * overflow-guarded evaluation of the associated polynomial recurrences and
//!   characteristic polynomials ([`polyrec`]);
//! * the operator view: matrix assembly, Hermitian splitting, Krylov rank and
//!   Gram degeneracy diagnostics ([`operator`]);
//! * two independent spectrum routes — Aberth–Ehrlich root finding on the
//!   characteristic polynomial and a dense QR eigensolver — plus localization
//!   boxes and cross-checking ([`spectra`]);
//! * real-axis analysis: sign properties of the characteristic polynomials,
//!   smallest-zero sequences, least real eigenvalues and eigenvalue
//!   trajectories ([`analysis`]);
//! * discrete quadrature measures built from the spectrum, with orthogonality
//!   diagnostics ([`quadrature`]).
//!
//! Results are deterministic: no randomness, no hash-ordered containers, and
//! text output (JSON/CSV) is emitted with a fixed float format so repeated
//! runs are byte-identical.

pub mod analysis;
pub mod coefficients;
mod dd;
mod error;
mod linalg;
pub mod operator;
pub mod polyrec;
pub mod quadrature;
pub mod spectra;
pub mod textfmt;

pub use error::{Error, Result};
