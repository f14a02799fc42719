//! Immutable expression trees.
//!
//! Every [`Expr`] is built through the smart constructors on this type
//! ([`Expr::sum`], [`Expr::product`], ...), which keep the tree in a
//! normal shape: sums and products are flat, a product carries at most
//! one rational coefficient and it comes first, and zero or unit
//! coefficients never appear as factors. Two trees are structurally equal
//! (`==`) exactly when they are identical in that normal shape.

mod indices;
mod matching;

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::Rational;

pub(crate) use indices::{base_name, map_top_terms};
pub use indices::{
    dummies, free_indices, index_names, occurrences, rename_dummies, rename_indices,
    uniquify_dummies, DUMMY_MARK,
};
pub(crate) use matching::check_rule_shape;
pub use matching::{instantiate, match_pattern, match_replace, Bindings, FreshNames};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variance {
    Upper,
    Lower,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Lower => Variance::Upper,
            Variance::Upper => Variance::Lower,
        }
    }
}

/// One index slot occurrence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Index {
    pub name: String,
    pub variance: Variance,
}

impl Index {
    pub fn new(name: impl Into<String>, variance: Variance) -> Self {
        Index {
            name: name.into(),
            variance,
        }
    }

    pub fn lower(name: impl Into<String>) -> Self {
        Index::new(name, Variance::Lower)
    }

    pub fn upper(name: impl Into<String>) -> Self {
        Index::new(name, Variance::Upper)
    }

    pub fn flipped(&self) -> Self {
        Index::new(self.name.clone(), self.variance.flip())
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variance {
            Variance::Lower => write!(f, "_{}", self.name),
            Variance::Upper => write!(f, "^{}", self.name),
        }
    }
}

/// A table of explicit components of an indexed object.
///
/// `indices` are the abstract slots the table stands for; every entry
/// gives the coordinate value taken by each slot (in slot order) and the
/// component there. Missing tuples are zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Components {
    pub head: String,
    pub indices: Vec<Index>,
    pub entries: Vec<ComponentEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentEntry {
    pub values: Vec<String>,
    pub value: Expr,
}

impl Components {
    pub fn get(&self, values: &[String]) -> Option<&Expr> {
        self.entries
            .iter()
            .find(|e| e.values == values)
            .map(|e| &e.value)
    }

    /// The concrete object named by one entry, e.g. `Γ^φ_{φθ}`.
    pub fn entry_atom(&self, values: &[String]) -> Expr {
        Expr::tensor(
            self.head.clone(),
            self.indices
                .iter()
                .zip(values)
                .map(|(i, v)| Index::new(v.clone(), i.variance))
                .collect(),
        )
    }
}

/// Expression tree node.
///
/// Variant order matters: it is the primary key of the total order used
/// when sorting product factors and sum terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Num(Rational),
    /// Symbol or tensor: a head name and its ordered index slots.
    Atom {
        name: String,
        indices: Vec<Index>,
    },
    Components(Box<Components>),
    /// Modifier such as the variation sign applied to an object.
    Accent {
        name: String,
        arg: Box<Expr>,
    },
    Func {
        name: String,
        arg: Box<Expr>,
    },
    Pow {
        base: Box<Expr>,
        exp: Box<Expr>,
    },
    Deriv {
        indices: Vec<Index>,
        arg: Box<Expr>,
    },
    Integral {
        body: Box<Expr>,
        var: String,
    },
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Equation(Box<Expr>, Box<Expr>),
    Rule(Box<Expr>, Box<Expr>),
    List(Vec<Expr>),
    Wildcard,
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(n.into()))
    }

    pub fn rational(q: Rational) -> Expr {
        Expr::Num(q)
    }

    pub fn zero() -> Expr {
        Expr::num(0)
    }

    pub fn one() -> Expr {
        Expr::num(1)
    }

    pub fn symbol(name: impl Into<String>) -> Expr {
        Expr::Atom {
            name: name.into(),
            indices: Vec::new(),
        }
    }

    pub fn tensor(name: impl Into<String>, indices: Vec<Index>) -> Expr {
        Expr::Atom {
            name: name.into(),
            indices,
        }
    }

    pub fn components(c: Components) -> Expr {
        Expr::Components(Box::new(c))
    }

    pub fn accent(name: impl Into<String>, arg: Expr) -> Expr {
        Expr::Accent {
            name: name.into(),
            arg: Box::new(arg),
        }
    }

    pub fn func(name: impl Into<String>, arg: Expr) -> Expr {
        Expr::Func {
            name: name.into(),
            arg: Box::new(arg),
        }
    }

    pub fn equation(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Equation(Box::new(lhs), Box::new(rhs))
    }

    pub fn rule(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Rule(Box::new(lhs), Box::new(rhs))
    }

    pub fn list(items: Vec<Expr>) -> Expr {
        Expr::List(items)
    }

    /// Flattened sum; numeric zeros are dropped.
    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut out = Vec::new();
        for t in terms {
            match t {
                Expr::Sum(inner) => out.extend(inner),
                Expr::Num(ref q) if q.is_zero() => {}
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Sum(out),
        }
    }

    /// Flattened product with all rational factors merged into one
    /// leading coefficient.
    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut out = Vec::new();
        for f in factors {
            match f {
                Expr::Num(q) => coeff *= q,
                Expr::Prod(inner) => {
                    for g in inner {
                        match g {
                            Expr::Num(q) => coeff *= q,
                            other => out.push(other),
                        }
                    }
                }
                other => out.push(other),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if out.is_empty() {
            return Expr::Num(coeff);
        }
        if coeff.is_one() && out.len() == 1 {
            return out.pop().unwrap();
        }
        if !coeff.is_one() {
            out.insert(0, Expr::Num(coeff));
        }
        Expr::Prod(out)
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        if let Expr::Num(e) = &exp {
            if e.is_one() {
                return base;
            }
            if e.is_zero() {
                return Expr::one();
            }
            if let Expr::Num(b) = &base {
                if b.is_one() {
                    return Expr::one();
                }
                if e.is_integer() && !(b.is_zero() && e.is_negative()) {
                    let k = e.to_integer();
                    return Expr::Num(num_traits::pow::Pow::pow(b.clone(), k));
                }
            }
        }
        Expr::Pow {
            base: Box::new(base),
            exp: Box::new(exp),
        }
    }

    /// Derivative node. Rational coefficients of the operand are pulled
    /// out; the derivative of a number is zero.
    pub fn deriv(indices: Vec<Index>, arg: Expr) -> Expr {
        if let Expr::Num(_) = arg {
            return Expr::zero();
        }
        let (c, rest) = arg.split_coefficient();
        if !c.is_one() {
            return Expr::product([Expr::Num(c), Expr::deriv(indices, rest)]);
        }
        Expr::Deriv {
            indices,
            arg: Box::new(rest),
        }
    }

    /// Integral node; a single-term integrand hands its coefficient out.
    pub fn integral(body: Expr, var: impl Into<String>) -> Expr {
        if body.is_zero() {
            return Expr::zero();
        }
        let (c, rest) = body.split_coefficient();
        if !c.is_one() && !rest.is_one() {
            return Expr::product([Expr::Num(c), Expr::integral(rest, var)]);
        }
        Expr::Integral {
            body: Box::new(body),
            var: var.into(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_one())
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self {
            Expr::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Expr::Atom { name, indices } if indices.is_empty() => Some(name),
            _ => None,
        }
    }

    /// Splits a term into its rational coefficient and the remaining
    /// factors (`1` when nothing remains).
    pub fn split_coefficient(&self) -> (Rational, Expr) {
        match self {
            Expr::Num(q) => (q.clone(), Expr::one()),
            Expr::Prod(fs) => match fs.first() {
                Some(Expr::Num(q)) => (q.clone(), Expr::product(fs[1..].iter().cloned())),
                _ => (Rational::one(), self.clone()),
            },
            _ => (Rational::one(), self.clone()),
        }
    }

    /// Non-coefficient factors of a term.
    pub fn factors(&self) -> Vec<Expr> {
        match self {
            Expr::Prod(fs) => fs
                .iter()
                .filter(|f| !matches!(f, Expr::Num(_)))
                .cloned()
                .collect(),
            Expr::Num(_) => Vec::new(),
            other => vec![other.clone()],
        }
    }

    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Sum(ts) => ts.clone(),
            other if other.is_zero() => Vec::new(),
            other => vec![other.clone()],
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Num(_) | Expr::Atom { .. } | Expr::Wildcard => Vec::new(),
            Expr::Components(c) => c.entries.iter().map(|e| &e.value).collect(),
            Expr::Accent { arg, .. } | Expr::Func { arg, .. } | Expr::Deriv { arg, .. } => {
                vec![arg]
            }
            Expr::Pow { base, exp } => vec![base, exp],
            Expr::Integral { body, .. } => vec![body],
            Expr::Sum(xs) | Expr::Prod(xs) | Expr::List(xs) => xs.iter().collect(),
            Expr::Equation(l, r) | Expr::Rule(l, r) => vec![l, r],
        }
    }

    /// Rebuilds this node around new children (same arity and order as
    /// [`Expr::children`]) through the normalizing constructors.
    pub fn with_children(&self, mut new: Vec<Expr>) -> Expr {
        match self {
            Expr::Num(_) | Expr::Atom { .. } | Expr::Wildcard => self.clone(),
            Expr::Components(c) => {
                let entries = c
                    .entries
                    .iter()
                    .zip(new)
                    .map(|(e, v)| ComponentEntry {
                        values: e.values.clone(),
                        value: v,
                    })
                    .collect();
                Expr::components(Components {
                    head: c.head.clone(),
                    indices: c.indices.clone(),
                    entries,
                })
            }
            Expr::Accent { name, .. } => Expr::accent(name.clone(), new.remove(0)),
            Expr::Func { name, .. } => Expr::func(name.clone(), new.remove(0)),
            Expr::Deriv { indices, .. } => Expr::deriv(indices.clone(), new.remove(0)),
            Expr::Pow { .. } => {
                let exp = new.pop().unwrap();
                Expr::pow(new.pop().unwrap(), exp)
            }
            Expr::Integral { var, .. } => Expr::integral(new.remove(0), var.clone()),
            Expr::Sum(_) => Expr::sum(new),
            Expr::Prod(_) => Expr::product(new),
            Expr::List(_) => Expr::List(new),
            Expr::Equation(..) => {
                let r = new.pop().unwrap();
                Expr::equation(new.pop().unwrap(), r)
            }
            Expr::Rule(..) => {
                let r = new.pop().unwrap();
                Expr::rule(new.pop().unwrap(), r)
            }
        }
    }

    pub fn map_children(&self, mut f: impl FnMut(&Expr) -> Expr) -> Expr {
        let new = self.children().into_iter().map(&mut f).collect();
        self.with_children(new)
    }

    pub fn try_map_children<E>(
        &self,
        mut f: impl FnMut(&Expr) -> Result<Expr, E>,
    ) -> Result<Expr, E> {
        let new = self
            .children()
            .into_iter()
            .map(&mut f)
            .collect::<Result<Vec<_>, E>>()?;
        Ok(self.with_children(new))
    }

    /// Applies `f` to every node, children first.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Expr) -> Expr) -> Expr {
        let rebuilt = self.map_children(|c| c.map_bottom_up(f));
        f(rebuilt)
    }

    pub fn try_map_bottom_up<E>(
        &self,
        f: &mut impl FnMut(Expr) -> Result<Expr, E>,
    ) -> Result<Expr, E> {
        let rebuilt = self.try_map_children(|c| c.try_map_bottom_up(f))?;
        f(rebuilt)
    }

    pub fn any_node(&self, pred: &mut impl FnMut(&Expr) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any_node(pred))
    }

    /// Own index slots of atoms, derivatives and component tables.
    pub fn own_indices(&self) -> &[Index] {
        match self {
            Expr::Atom { indices, .. } | Expr::Deriv { indices, .. } => indices,
            Expr::Components(c) => &c.indices,
            _ => &[],
        }
    }

    /// Replaces the own index slots (see [`Expr::own_indices`]).
    pub fn with_own_indices(&self, new: Vec<Index>) -> Expr {
        match self {
            Expr::Atom { name, .. } => Expr::tensor(name.clone(), new),
            Expr::Deriv { arg, .. } => Expr::Deriv {
                indices: new,
                arg: arg.clone(),
            },
            Expr::Components(c) => Expr::components(Components {
                head: c.head.clone(),
                indices: new,
                entries: c.entries.clone(),
            }),
            other => other.clone(),
        }
    }

    /// True when the tree holds no indexed objects, derivatives, accents
    /// or structural nodes: something the scalar kernel can work on.
    pub fn is_scalar(&self) -> bool {
        !self.any_node(&mut |n| match n {
            Expr::Atom { indices, .. } => !indices.is_empty(),
            Expr::Components(_)
            | Expr::Accent { .. }
            | Expr::Deriv { .. }
            | Expr::Equation(..)
            | Expr::Rule(..)
            | Expr::List(_)
            | Expr::Wildcard => true,
            _ => false,
        })
    }

    /// Index-free symbol names occurring anywhere in the tree.
    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.any_node(&mut |n| {
            if let Some(s) = n.as_symbol() {
                if !out.iter().any(|o| o == s) {
                    out.push(s.to_string());
                }
            }
            if let Expr::Integral { var, .. } = n {
                if !out.iter().any(|o| o == var) {
                    out.push(var.clone());
                }
            }
            false
        });
        out
    }
}

/// Order of product factors: by base, then by exponent, so that `r`,
/// `r^2` and `r^{-2}` sort together.
pub fn factor_order(a: &Expr, b: &Expr) -> Ordering {
    fn split(e: &Expr) -> (&Expr, Option<&Expr>) {
        match e {
            Expr::Pow { base, exp } => (base, Some(exp)),
            other => (other, None),
        }
    }
    let (ba, ea) = split(a);
    let (bb, eb) = split(b);
    let one = Expr::one();
    ba.cmp(bb)
        .then_with(|| ea.unwrap_or(&one).cmp(eb.unwrap_or(&one)))
}

/// Order of sum terms: by the coefficient-free part, then coefficient.
pub fn term_order(a: &Expr, b: &Expr) -> Ordering {
    let (ca, ra) = a.split_coefficient();
    let (cb, rb) = b.split_coefficient();
    ra.cmp(&rb).then_with(|| ca.cmp(&cb))
}

impl std::ops::Neg for Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        Expr::product([Expr::num(-1), self])
    }
}
