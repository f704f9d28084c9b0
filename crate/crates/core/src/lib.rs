//! Mean-square estimates for exponential sums and Dirichlet polynomials.
//!
//! The crate evaluates, exactly where possible and by panel quadrature
//! elsewhere, both sides of Gallagher-type inequalities
//!
//! ```text
//! ∫_{-T}^{T} |S(t)|^2 dt  <=  C(θ) δ^{-2} ∫_R |Σ_{|ν-x|<=δ} w(ν-x) c(ν)|^2 dx,   δ = θ/T,
//! ```
//!
//! for rectangular and Cesàro (triangle) windows, their Dirichlet-polynomial
//! forms, and the discrete Selberg integrals of arithmetic functions.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the common double-precision instantiation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod error;
pub mod export;
pub mod kernels;
pub mod meansquare;
pub mod quadrature;
pub mod scalar;
pub mod summation;
pub mod sums;
pub mod verify;

pub use error::{Error, Result};
pub use kernels::{explicit_constant, Kernel, KernelShape, WindowParams};
pub use meansquare::{IntegralResult, IntegrationMethod, SelbergWindow};
pub use scalar::Scalar;
pub use sums::{CriticalLinePolynomial, DirichletPolynomial, ExponentialSum};
pub use verify::{Inequality, VerificationReport};

pub use num_complex::Complex;

pub type ArithmeticSequence64 = arith::ArithmeticSequence<f64>;
pub type ExponentialSum64 = ExponentialSum<f64>;
pub type DirichletPolynomial64 = DirichletPolynomial<f64>;
pub type Kernel64 = Kernel<f64>;
pub type WindowParams64 = WindowParams<f64>;
pub type SelbergWindow64 = SelbergWindow<f64>;
pub type IntegralResult64 = IntegralResult<f64>;
pub type Complex64 = Complex<f64>;

pub type ArithmeticSequence32 = arith::ArithmeticSequence<f32>;
pub type ExponentialSum32 = ExponentialSum<f32>;
pub type DirichletPolynomial32 = DirichletPolynomial<f32>;
pub type WindowParams32 = WindowParams<f32>;
