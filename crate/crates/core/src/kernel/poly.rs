//! Sparse multivariate Laurent polynomials over opaque bases.
//!
//! A base is anything the kernel does not look inside: a symbol, a
//! function application with simplified argument, a sum raised to a
//! non-expandable power, an unevaluated integral.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expr::{factor_order, term_order, Expr};
use crate::Rational;

pub(crate) type Monomial = BTreeMap<Expr, Rational>;

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Poly {
    pub terms: BTreeMap<Monomial, Rational>,
}

/// Largest positive integer power of a sum that is multiplied out.
const MAX_EXPANSION: u32 = 32;

impl Poly {
    pub fn constant(q: Rational) -> Poly {
        let mut p = Poly::default();
        p.add_term(Monomial::new(), q);
        p
    }

    pub fn base(b: Expr, exp: Rational) -> Poly {
        let mut m = Monomial::new();
        if !exp.is_zero() {
            m.insert(b, exp);
        }
        let mut p = Poly::default();
        p.add_term(m, Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(mul_monomials(m1, m2), c1 * c2);
            }
        }
        out
    }

    pub fn single(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn pow_int(&self, n: u32) -> Poly {
        let mut out = Poly::constant(Rational::one());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// `self^q`. Single terms distribute the power over their factors;
    /// sums are multiplied out for small positive integer powers and kept
    /// as an opaque base otherwise.
    pub fn pow(&self, q: &Rational) -> Result<Poly> {
        if self.is_zero() {
            return if q.is_positive() {
                Ok(Poly::default())
            } else {
                Err(Error::Undefined(
                    "zero raised to a non-positive power".to_string(),
                ))
            };
        }
        if let Some((m, c)) = self.single() {
            let coeff = if q.is_integer() {
                Some(num_traits::pow::Pow::pow(c.clone(), q.to_integer()))
            } else if c.is_one() {
                Some(Rational::one())
            } else {
                None
            };
            if let Some(coeff) = coeff {
                let mono: Monomial = m
                    .iter()
                    .map(|(b, e)| (b.clone(), e * q))
                    .filter(|(_, e)| !e.is_zero())
                    .collect();
                let mut p = Poly::default();
                p.add_term(mono, coeff);
                return Ok(p);
            }
        }
        if q.is_integer() && q.is_positive() {
            if let Some(n) = q.to_integer().to_u32().filter(|n| *n <= MAX_EXPANSION) {
                return Ok(self.pow_int(n));
            }
        }
        Ok(Poly::base(self.to_expr(), q.clone()))
    }

    /// Multiplies out sums that ended up with a positive integer power
    /// inside a monomial.
    pub fn normalize(self) -> Poly {
        let mut cur = self;
        loop {
            let mut changed = false;
            let mut out = Poly::default();
            for (m, c) in cur.terms {
                let hit = m.iter().find_map(|(b, e)| {
                    let n = (matches!(b, Expr::Sum(_)) && e.is_integer() && e.is_positive())
                        .then(|| e.to_integer().to_u32())
                        .flatten()?;
                    (n <= MAX_EXPANSION).then(|| (b.clone(), n))
                });
                match hit {
                    Some((b, n)) => {
                        changed = true;
                        let mut rest = m.clone();
                        rest.remove(&b);
                        let mut head = Poly::default();
                        head.add_term(rest, c);
                        let inner = super::to_poly(&b)
                            .unwrap_or_else(|_| Poly::base(b.clone(), Rational::one()));
                        for (m2, c2) in head.mul(&inner.pow_int(n)).terms {
                            out.add_term(m2, c2);
                        }
                    }
                    None => out.add_term(m, c),
                }
            }
            cur = out;
            if !changed {
                return cur;
            }
        }
    }

    pub fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = self
            .terms
            .iter()
            .map(|(m, c)| {
                Expr::product(std::iter::once(Expr::Num(c.clone())).chain(monomial_factors(m)))
            })
            .collect();
        terms.sort_by(term_order);
        Expr::sum(terms)
    }
}

pub(crate) fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (base, e) in b {
        let slot = out.entry(base.clone()).or_insert_with(Rational::zero);
        *slot += e;
        if slot.is_zero() {
            out.remove(base);
        }
    }
    out
}

/// Factors of a monomial in display order. A monomial made only of
/// reciprocals, with more than one factor, is written as the reciprocal
/// of a product: `(r^2 sin(t)^2)^(-1)`.
fn monomial_factors(m: &Monomial) -> Vec<Expr> {
    if m.len() > 1 && m.values().all(|e| e.is_negative()) {
        let mut inner: Vec<Expr> = m
            .iter()
            .map(|(b, e)| Expr::pow(b.clone(), Expr::Num(-e)))
            .collect();
        inner.sort_by(factor_order);
        return vec![Expr::pow(Expr::product(inner), Expr::num(-1))];
    }
    let mut fs: Vec<Expr> = m
        .iter()
        .map(|(b, e)| Expr::pow(b.clone(), Expr::Num(e.clone())))
        .collect();
    fs.sort_by(factor_order);
    fs
}
