//! Interpolatory cubature rules with nodes at roots of unity.
//!
//! The crate is organised in layers, each building on the previous one:
//!
//! * [`cyclo`] - exact arithmetic in the cyclotomic field Q(w_m), the number
//!   system every later decision (rank, support, weight equality) is made in.
//! * [`linalg`] - dense exact linear algebra over Q(w_m) plus a small
//!   floating-point layer used for cross-checks and approximate solves.
//! * [`design`] - node sets in Omega_m^k, monomial evaluation, indicator
//!   functions and regularity checks.
//! * [`interp`] - monomial bases, evaluation matrices, correctness of a
//!   (design, basis) pair and greedy quotient-basis extraction.
//! * [`measures`] - moment providers: discrete measures on Omega_m^k, the
//!   zero-mean complex Gaussian, and seeded Monte Carlo estimation.
//! * [`cubature`] - weight computation, exactness verification, equal-weight
//!   basis search and precision reports.
//!
//! All decision procedures run over exact cyclotomic arithmetic; floating
//! point appears only in explicitly approximate outputs (decimal renderings,
//! Monte Carlo estimates, and the float fallback for non-exact providers).

pub mod cubature;
pub mod cyclo;
pub mod design;
pub mod interp;
pub mod linalg;
pub mod measures;

mod error;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
