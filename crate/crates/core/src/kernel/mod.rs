//! Scalar kernel: simplification, differentiation, basic integration and
//! trigonometric normalization of index-free expressions.
//!
//! Everything goes through a Laurent-polynomial normal form ([`poly`])
//! whose bases are symbols, `sin`/`cos`/`log` applications, opaque powers
//! of sums and unevaluated integrals. `tan` is expanded to `sin cos^-1`
//! on the way in and only reappears through [`trig_normalize`].

mod numeric;
mod poly;

use std::ops::Neg;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::Rational;

pub use numeric::{eval, Point};
pub(crate) use poly::Poly;

/// Scalar functions the kernel knows derivatives and values for.
pub const FUNCTIONS: [&str; 4] = ["sin", "cos", "tan", "log"];

pub(crate) fn to_poly(e: &Expr) -> Result<Poly> {
    Ok(match e {
        Expr::Num(q) => Poly::constant(q.clone()),
        Expr::Sum(ts) => {
            let mut acc = Poly::default();
            for t in ts {
                acc = acc.add(&to_poly(t)?);
            }
            acc
        }
        Expr::Prod(fs) => {
            let mut acc = Poly::constant(Rational::one());
            for f in fs {
                acc = acc.mul(&to_poly(f)?);
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Expr::Pow { base, exp } => {
            let exp = simplify(exp)?;
            match exp {
                Expr::Num(q) if q.is_integer() && matches!(**base, Expr::Prod(_)) => {
                    let Expr::Prod(fs) = &**base else {
                        unreachable!()
                    };
                    let mut acc = Poly::constant(Rational::one());
                    for f in fs {
                        let part = match f {
                            Expr::Pow { base: b, exp: k } => match k.as_num() {
                                Some(k) if k.is_integer() => {
                                    to_poly(&Expr::pow((**b).clone(), Expr::Num(k * &q)))?
                                }
                                _ => to_poly(f)?.pow(&q)?,
                            },
                            _ => to_poly(f)?.pow(&q)?,
                        };
                        acc = acc.mul(&part);
                    }
                    acc
                }
                Expr::Num(q) => to_poly(base)?.pow(&q)?,
                other => {
                    let b = simplify(base)?;
                    Poly::base(Expr::pow(b, other), Rational::one())
                }
            }
        }
        Expr::Func { name, arg } => {
            let a = simplify(arg)?;
            match (name.as_str(), &a) {
                ("sin" | "tan", a) if a.is_zero() => Poly::default(),
                ("cos", a) if a.is_zero() => Poly::constant(Rational::one()),
                ("log", a) if a.is_one() => Poly::default(),
                ("log", a) if a.is_zero() => return Err(Error::Undefined("log(0)".to_string())),
                ("tan", _) => Poly::base(Expr::func("sin", a.clone()), Rational::one())
                    .mul(&Poly::base(Expr::func("cos", a), -Rational::one())),
                _ => Poly::base(Expr::func(name.clone(), a), Rational::one()),
            }
        }
        Expr::Integral { body, var } => {
            let b = simplify(body)?;
            let (c, rest) = Expr::integral(b, var.clone()).split_coefficient();
            let mut p = Poly::base(rest, Rational::one());
            p = p.mul(&Poly::constant(c));
            p
        }
        other => Poly::base(other.clone(), Rational::one()),
    }
    .normalize())
}

/// Replaces `cos^k` (integer `k >= 2`) by `cos^(k-2) (1 - sin^2)` until no
/// such power remains, so every Pythagorean combination cancels.
fn reduce_pythagoras(p: Poly) -> Poly {
    let mut cur = p;
    loop {
        let mut changed = false;
        let mut out = Poly::default();
        for (m, c) in cur.terms {
            let hit = m.iter().find_map(|(b, e)| match b {
                Expr::Func { name, arg }
                    if name == "cos"
                        && e.is_integer()
                        && *e >= Rational::from_integer(2.into()) =>
                {
                    Some((b.clone(), e.clone(), (**arg).clone()))
                }
                _ => None,
            });
            match hit {
                None => out.add_term(m, c),
                Some((cos, k, arg)) => {
                    changed = true;
                    let mut rest = m.clone();
                    let left = k - Rational::from_integer(2.into());
                    if left.is_zero() {
                        rest.remove(&cos);
                    } else {
                        rest.insert(cos, left);
                    }
                    let mut head = Poly::default();
                    head.add_term(rest, c);
                    let sin2 = Poly::base(Expr::func("sin", arg), Rational::from_integer(2.into()));
                    let factor = Poly::constant(Rational::one())
                        .add(&sin2.mul(&Poly::constant(-Rational::one())));
                    for (m2, c2) in head.mul(&factor).terms {
                        out.add_term(m2, c2);
                    }
                }
            }
        }
        cur = out;
        if !changed {
            return cur;
        }
    }
}

/// Canonical form: powers of equal bases merged, integer powers of sums
/// multiplied out, like terms collected, `sin^2 + cos^2` reduced.
pub fn simplify(e: &Expr) -> Result<Expr> {
    check_scalar(e)?;
    Ok(reduce_pythagoras(to_poly(e)?).to_expr())
}

fn check_scalar(e: &Expr) -> Result<()> {
    if e.is_scalar() {
        Ok(())
    } else {
        Err(Error::NotScalar(crate::notation::print_plain(e)))
    }
}

fn depends_on(e: &Expr, c: &str) -> bool {
    e.any_node(&mut |n| match n {
        Expr::Atom { name, indices } => indices.is_empty() && name == c,
        _ => false,
    })
}

/// Partial derivative with respect to the symbol `c`.
pub fn diff(e: &Expr, c: &str) -> Result<Expr> {
    check_scalar(e)?;
    simplify(&diff_raw(e, c)?)
}

fn diff_raw(e: &Expr, c: &str) -> Result<Expr> {
    if !depends_on(e, c) {
        return Ok(Expr::zero());
    }
    Ok(match e {
        Expr::Atom { .. } => Expr::one(),
        Expr::Sum(ts) => Expr::sum(
            ts.iter()
                .map(|t| diff_raw(t, c))
                .collect::<Result<Vec<_>>>()?,
        ),
        Expr::Prod(fs) => {
            let mut terms = Vec::new();
            for i in 0..fs.len() {
                let d = diff_raw(&fs[i], c)?;
                if d.is_zero() {
                    continue;
                }
                let mut f = fs.clone();
                f[i] = d;
                terms.push(Expr::product(f));
            }
            Expr::sum(terms)
        }
        Expr::Pow { base, exp } => {
            let b = (**base).clone();
            let x = (**exp).clone();
            let db = diff_raw(&b, c)?;
            if !depends_on(&x, c) {
                Expr::product([x.clone(), Expr::pow(b, Expr::sum([x, Expr::num(-1)])), db])
            } else {
                let dx = diff_raw(&x, c)?;
                let outer = Expr::pow(b.clone(), x.clone());
                let inner = Expr::sum([
                    Expr::product([dx, Expr::func("log", b.clone())]),
                    Expr::product([x, db, Expr::pow(b, Expr::num(-1))]),
                ]);
                Expr::product([outer, inner])
            }
        }
        Expr::Func { name, arg } => {
            let a = (**arg).clone();
            let da = diff_raw(&a, c)?;
            let outer = match name.as_str() {
                "sin" => Expr::func("cos", a),
                "cos" => Expr::func("sin", a).neg(),
                "tan" => Expr::pow(Expr::func("cos", a), Expr::num(-2)),
                "log" => Expr::pow(a, Expr::num(-1)),
                other => return Err(Error::UnknownFunction(other.to_string())),
            };
            Expr::product([outer, da])
        }
        Expr::Integral { body, var } if var == c => (**body).clone(),
        Expr::Integral { body, var } => Expr::integral(diff_raw(body, c)?, var.clone()),
        other => return Err(Error::NotScalar(crate::notation::print_plain(other))),
    })
}

/// Antiderivative of a linear combination of powers of `c` (constant
/// integration is omitted).
pub fn integrate_basic(e: &Expr, c: &str) -> Result<Expr> {
    check_scalar(e)?;
    let var = Expr::symbol(c);
    let p = to_poly(e)?;
    let mut out = Poly::default();
    for (m, coeff) in &p.terms {
        let n = m.get(&var).cloned().unwrap_or_else(Rational::zero);
        if m.iter().any(|(b, _)| *b != var && depends_on(b, c)) {
            return Err(Error::UnsupportedIntegral(crate::notation::print_plain(e)));
        }
        let mut rest = m.clone();
        rest.remove(&var);
        let mut term = Poly::default();
        if n == -Rational::one() {
            rest.insert(Expr::func("log", var.clone()), Rational::one());
            term.add_term(rest, coeff.clone());
        } else {
            let k = &n + Rational::one();
            rest.insert(var.clone(), k.clone());
            term.add_term(rest, coeff / k);
        }
        out = out.add(&term);
    }
    Ok(out.to_expr())
}

/// Reduces with `sin^2 + cos^2 = 1`, then rewrites `sin^k cos^-k` as
/// `tan^k`.
pub fn trig_normalize(e: &Expr) -> Result<Expr> {
    check_scalar(e)?;
    let p = reduce_pythagoras(to_poly(e)?);
    let mut out = Poly::default();
    for (m, c) in p.terms {
        let mut m = m;
        let sines: Vec<(Expr, Rational)> = m
            .iter()
            .filter_map(|(b, k)| match b {
                Expr::Func { name, arg } if name == "sin" => Some(((**arg).clone(), k.clone())),
                _ => None,
            })
            .collect();
        for (arg, k) in sines {
            let cos = Expr::func("cos", arg.clone());
            if m.get(&cos) == Some(&-k.clone()) {
                m.remove(&cos);
                m.remove(&Expr::func("sin", arg.clone()));
                m.insert(Expr::func("tan", arg), k);
            }
        }
        out.add_term(m, c);
    }
    Ok(out.to_expr())
}

/// Evaluates integral nodes the kernel can do and simplifies; unsupported
/// integrals stay as they are.
pub fn simplify_full(e: &Expr) -> Result<Expr> {
    check_scalar(e)?;
    let done = e.try_map_bottom_up(&mut |n| match &n {
        Expr::Integral { body, var } => match integrate_basic(body, var) {
            Ok(v) => Ok(v),
            Err(Error::UnsupportedIntegral(_)) => Ok(n),
            Err(err) => Err(err),
        },
        _ => Ok(n),
    })?;
    simplify(&done)
}

/// Named entry point used by the session: `integrate`, `simplify`, or
/// `expand_trig` / `trig_normalize`.
pub fn scalar_call(name: &str, e: &Expr) -> Result<Expr> {
    match name {
        "simplify" => simplify_full(e),
        "expand_trig" | "trig_normalize" => trig_normalize(e),
        "integrate" => {
            check_scalar(e)?;
            if let Expr::Integral { body, var } = e {
                return integrate_basic(body, var);
            }
            let syms = e.symbols();
            match syms.as_slice() {
                [x] => integrate_basic(e, x),
                _ => Err(Error::UnsupportedIntegral(format!(
                    "cannot pick an integration variable in {}",
                    crate::notation::print_plain(e)
                ))),
            }
        }
        other => Err(Error::UnknownFunction(other.to_string())),
    }
}

/// Applies `f` to every maximal scalar subexpression of `e`.
pub fn map_scalar_parts(e: &Expr, f: &mut impl FnMut(&Expr) -> Result<Expr>) -> Result<Expr> {
    if e.is_scalar() {
        return f(e);
    }
    e.try_map_children(|c| map_scalar_parts(c, f))
}
