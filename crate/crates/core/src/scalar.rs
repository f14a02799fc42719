//! Numeric scalar types that expressions can be evaluated over.
//!
//! Expression trees hold exact rationals. Numerical checks (finite
//! differences, oracle contractions) evaluate those trees over any type
//! implementing [`Scalar`]: `f32`, `f64`, or exact [`Rational`] when the
//! expression is free of transcendental functions.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Float, One, ToPrimitive, Zero};

use crate::Rational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(q: &Rational) -> Option<Self>;

    /// `self^e`; `None` when the power is not representable in this type.
    fn pow_rational(&self, e: &Rational) -> Option<Self>;

    fn sin(&self) -> Option<Self>;
    fn cos(&self) -> Option<Self>;
    fn tan(&self) -> Option<Self>;
    fn ln(&self) -> Option<Self>;

    fn magnitude(&self) -> f64;
}

/// Marker for the IEEE float scalars.
pub trait Real: Scalar + Float {}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_rational(q: &Rational) -> Option<Self> {
                let n = q.numer().to_f64()?;
                let d = q.denom().to_f64()?;
                Some((n / d) as $t)
            }

            fn pow_rational(&self, e: &Rational) -> Option<Self> {
                if e.is_integer() {
                    let k = e.to_integer().to_i32()?;
                    Some(self.powi(k))
                } else {
                    Some(self.powf(<$t>::from_rational(e)?))
                }
            }

            fn sin(&self) -> Option<Self> {
                Some(Float::sin(*self))
            }
            fn cos(&self) -> Option<Self> {
                Some(Float::cos(*self))
            }
            fn tan(&self) -> Option<Self> {
                Some(Float::tan(*self))
            }
            fn ln(&self) -> Option<Self> {
                Some(Float::ln(*self))
            }

            fn magnitude(&self) -> f64 {
                Float::abs(*self) as f64
            }
        }

        impl Real for $t {}
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Option<Self> {
        Some(q.clone())
    }

    fn pow_rational(&self, e: &Rational) -> Option<Self> {
        if !e.is_integer() {
            return None;
        }
        let k = e.to_integer();
        if self.is_zero() && k < BigInt::zero() {
            return None;
        }
        Some(num_traits::pow::Pow::pow(self.clone(), k))
    }

    fn sin(&self) -> Option<Self> {
        self.is_zero().then(Rational::zero)
    }
    fn cos(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }
    fn tan(&self) -> Option<Self> {
        self.is_zero().then(Rational::zero)
    }
    fn ln(&self) -> Option<Self> {
        self.is_one().then(Rational::zero)
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
}
