//! Numerics for first-kind quantum measurement.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - projective measurement on finite-dimensional systems ([`measurement`]),
//! - measurement in superposed degenerate bases ([`nondemolition`]),
//! - cell-discretized continuum eigenstates ([`rhs`]),
//! - survival-averaged (non-ideal) density matrices ([`survival`]),
//! - the survival effect on position distributions of a Gaussian packet ([`position`]),
//! - finite-dimensional wave operators and S-matrices ([`scattering`]).
//!
//! Dense complex linear algebra, special functions and quadrature live in
//! [`linalg`], [`special`] and [`quad`].

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod linalg;
pub mod measurement;
pub mod nondemolition;
pub mod position;
pub mod quad;
pub mod rhs;
pub mod scattering;
pub mod special;
pub mod sum;
pub mod survival;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, DensityMatrix, Hamiltonian};
pub use num_complex::Complex64;

/// Default absolute max-norm tolerance for Hermiticity, trace and unitarity checks.
pub const DEFAULT_TOL: f64 = 1e-10;
