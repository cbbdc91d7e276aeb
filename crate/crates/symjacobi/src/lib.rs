//! Symmetrized Jacobi expansions: bases, Poisson semigroup kernels, Riesz transforms,
//! square functions, spectral multipliers and numerical checks of their kernel estimates.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod estimates;
pub mod jacobi;
pub mod kernels;
pub mod operators;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod verify;

pub use error::{Error, Result};

/// Jacobi parameters in double precision.
pub type Params = jacobi::JacobiParams<f64>;
/// Jacobi parameters in single precision.
pub type ParamsF32 = jacobi::JacobiParams<f32>;
/// Symmetrized coefficient vector in double precision.
pub type Coeffs = basis::SymmetrizedCoeffs<f64>;
/// Symmetrized coefficient vector in single precision.
pub type CoeffsF32 = basis::SymmetrizedCoeffs<f32>;
