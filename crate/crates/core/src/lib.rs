//! Tensor computer algebra with TeX-like notation.
//!
//! The crate is layered: [`expr`] holds the immutable expression tree and
//! the index bookkeeping, [`properties`] the declarations that give
//! objects meaning, [`rewrite`] the abstract-index algorithms, [`kernel`]
//! the scalar simplifier, [`components`] explicit component evaluation,
//! and [`session`] the statement interpreter behind the command-line tool.

pub mod components;
pub mod error;
pub mod expr;
pub mod kernel;
pub mod notation;
pub mod properties;
pub mod rewrite;
pub mod scalar;
pub mod session;

pub use error::{Error, Result};
pub use expr::{Expr, Index, Variance};
pub use properties::{Property, Registry};
pub use scalar::{Real, Scalar};

/// Exact coefficients of every expression.
pub type Rational = num_rational::BigRational;

/// Evaluation points over the supported scalar types.
pub type PointF64 = kernel::Point<f64>;
pub type PointF32 = kernel::Point<f32>;
pub type PointExact = kernel::Point<Rational>;
