//! Numerical evaluation of scalar expressions over any [`Scalar`] type.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::notation::print_plain;
use crate::scalar::Scalar;

/// Values of the symbols an expression is evaluated at.
pub type Point<S> = BTreeMap<String, S>;

pub fn eval<S: Scalar>(e: &Expr, at: &Point<S>) -> Result<S> {
    let undefined = || Error::Undefined(print_plain(e));
    match e {
        Expr::Num(q) => S::from_rational(q).ok_or_else(undefined),
        Expr::Atom { name, indices } if indices.is_empty() => at
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Undefined(name.clone())),
        Expr::Sum(ts) => ts
            .iter()
            .try_fold(S::zero(), |acc, t| Ok(acc + eval(t, at)?)),
        Expr::Prod(fs) => fs
            .iter()
            .try_fold(S::one(), |acc, f| Ok(acc * eval(f, at)?)),
        Expr::Pow { base, exp } => {
            let b = eval(base, at)?;
            let q = exp.as_num().ok_or_else(undefined)?;
            b.pow_rational(q).ok_or_else(undefined)
        }
        Expr::Func { name, arg } => {
            let a = eval(arg, at)?;
            match name.as_str() {
                "sin" => a.sin(),
                "cos" => a.cos(),
                "tan" => a.tan(),
                "log" => a.ln(),
                other => return Err(Error::UnknownFunction(other.to_string())),
            }
            .ok_or_else(undefined)
        }
        other => Err(Error::NotScalar(print_plain(other))),
    }
}
