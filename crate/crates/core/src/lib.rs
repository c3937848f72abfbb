//! Coulomb-Sturmian matrix representation of the relativistic Coulomb
//! Green's operator for the radial Klein-Gordon and second-order Dirac
//! equations.
//!
//! The radial operator is a symmetric tridiagonal (Jacobi) matrix on the
//! Sturmian basis, so every leading principal block of its inverse follows
//! from the truncated matrix plus a single continued-fraction corner term.
//! Bound-state energies are the zeros of the determinant of that block.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod greens;
pub mod jacobi;
pub mod model;
pub mod spectrum;

use nalgebra::ComplexField;

pub use error::{Error, Result};

/// Field the Green's matrices are evaluated over: `f64` for real energies,
/// `Complex<f64>` for complex ones.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}

impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}
