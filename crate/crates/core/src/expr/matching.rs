//! Pattern matching with index binding, and the replace primitive.

use std::collections::{BTreeMap, BTreeSet};

use super::indices::{free_indices, index_names, map_top_terms};
use super::{Expr, Index};
use crate::error::{Error, Result};
use crate::properties::Registry;

/// Pattern index name -> (target index name, variance flipped).
pub type Bindings = BTreeMap<String, (String, bool)>;

/// Source of fresh index names that avoid everything already in use.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    taken: BTreeSet<String>,
}

impl FreshNames {
    pub fn avoiding(taken: BTreeSet<String>) -> Self {
        FreshNames { taken }
    }

    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    pub fn fresh(&mut self, like: &str, reg: &Registry) -> Result<String> {
        let pick = reg
            .index_pool(like)
            .into_iter()
            .find(|n| !self.taken.contains(n))
            .ok_or_else(|| Error::OutOfIndices(like.to_string()))?;
        self.taken.insert(pick.clone());
        Ok(pick)
    }
}

fn match_index(p: &Index, t: &Index, reg: &Registry, b: &mut Bindings) -> bool {
    if reg.is_coordinate(&p.name) {
        return p == t;
    }
    let flipped = p.variance != t.variance;
    if flipped && !reg.position_free(&p.name) {
        return false;
    }
    match b.get(&p.name) {
        Some((n, f)) => *n == t.name && *f == flipped,
        None => {
            b.insert(p.name.clone(), (t.name.clone(), flipped));
            true
        }
    }
}

fn match_indices(ps: &[Index], ts: &[Index], reg: &Registry, b: &Bindings) -> Option<Bindings> {
    if ps.len() != ts.len() {
        return None;
    }
    let mut b = b.clone();
    ps.iter()
        .zip(ts)
        .all(|(p, t)| match_index(p, t, reg, &mut b))
        .then_some(b)
}

/// All ways `pattern` matches `target` extending `b`.
fn match_all(pattern: &Expr, target: &Expr, reg: &Registry, b: &Bindings) -> Vec<Bindings> {
    use Expr::*;
    match (pattern, target) {
        (Wildcard, _) => vec![b.clone()],
        (Num(p), Num(t)) if p == t => vec![b.clone()],
        (
            Atom {
                name: pn,
                indices: pi,
            },
            Atom {
                name: tn,
                indices: ti,
            },
        ) if pn == tn => match_indices(pi, ti, reg, b).into_iter().collect(),
        (Components(p), Components(t)) if p.head == t.head && p.entries == t.entries => {
            match_indices(&p.indices, &t.indices, reg, b)
                .into_iter()
                .collect()
        }
        (Accent { name: pn, arg: pa }, Accent { name: tn, arg: ta })
        | (Func { name: pn, arg: pa }, Func { name: tn, arg: ta })
            if pn == tn =>
        {
            match_all(pa, ta, reg, b)
        }
        (
            Deriv {
                indices: pi,
                arg: pa,
            },
            Deriv {
                indices: ti,
                arg: ta,
            },
        ) => match match_indices(pi, ti, reg, b) {
            Some(b2) => match_all(pa, ta, reg, &b2),
            None => Vec::new(),
        },
        (Integral { body: pb, var: pv }, Integral { body: tb, var: tv }) if pv == tv => {
            match_all(pb, tb, reg, b)
        }
        (Prod(_), Prod(_)) => {
            let (pc, pr) = pattern.split_coefficient();
            let (tc, tr) = target.split_coefficient();
            if pc != tc {
                return Vec::new();
            }
            let pf = pr.factors();
            let tf = tr.factors();
            if pf.len() != tf.len() {
                return Vec::new();
            }
            let mut out = Vec::new();
            match_unordered(&pf, &tf, &mut vec![false; tf.len()], reg, b, &mut out);
            out
        }
        (Pow { base: pb, exp: pe }, Pow { base: tb, exp: te }) => match_seq(
            &[pb.as_ref(), pe.as_ref()],
            &[tb.as_ref(), te.as_ref()],
            reg,
            b,
        ),
        (Equation(pl, pr), Equation(tl, tr)) | (Rule(pl, pr), Rule(tl, tr)) => match_seq(
            &[pl.as_ref(), pr.as_ref()],
            &[tl.as_ref(), tr.as_ref()],
            reg,
            b,
        ),
        (Sum(ps), Sum(ts)) | (List(ps), List(ts)) if ps.len() == ts.len() => {
            let ps: Vec<&Expr> = ps.iter().collect();
            let ts: Vec<&Expr> = ts.iter().collect();
            match_seq(&ps, &ts, reg, b)
        }
        _ => Vec::new(),
    }
}

fn match_seq(ps: &[&Expr], ts: &[&Expr], reg: &Registry, b: &Bindings) -> Vec<Bindings> {
    let mut current = vec![b.clone()];
    for (p, t) in ps.iter().zip(ts) {
        current = current
            .iter()
            .flat_map(|b| match_all(p, t, reg, b))
            .collect();
        if current.is_empty() {
            break;
        }
    }
    current
}

fn match_unordered(
    ps: &[Expr],
    ts: &[Expr],
    used: &mut Vec<bool>,
    reg: &Registry,
    b: &Bindings,
    out: &mut Vec<Bindings>,
) {
    let Some((p, rest)) = ps.split_first() else {
        out.push(b.clone());
        return;
    };
    for j in 0..ts.len() {
        if used[j] {
            continue;
        }
        for b2 in match_all(p, &ts[j], reg, b) {
            used[j] = true;
            match_unordered(rest, ts, used, reg, &b2, out);
            used[j] = false;
        }
    }
}

/// First way `pattern` matches `target`, if any.
pub fn match_pattern(pattern: &Expr, target: &Expr, reg: &Registry) -> Option<Bindings> {
    match_all(pattern, target, reg, &Bindings::new())
        .into_iter()
        .next()
}

/// Instantiates a rule template: bound indices take their matched names
/// (and variance flips); unbound ones get fresh names, consistently
/// within this one instantiation.
pub fn instantiate(
    template: &Expr,
    b: &Bindings,
    fresh: &mut FreshNames,
    reg: &Registry,
) -> Result<Expr> {
    let mut local: BTreeMap<String, String> = BTreeMap::new();
    template.try_map_bottom_up(&mut |n| {
        let own = n.own_indices();
        if own.is_empty() {
            return Ok(n);
        }
        let mut new = Vec::with_capacity(own.len());
        for i in own {
            if reg.is_coordinate(&i.name) {
                new.push(i.clone());
            } else if let Some((to, flip)) = b.get(&i.name) {
                let v = if *flip { i.variance.flip() } else { i.variance };
                new.push(Index::new(to.clone(), v));
            } else {
                let to = match local.get(&i.name) {
                    Some(t) => t.clone(),
                    None => {
                        let t = fresh.fresh(&i.name, reg)?;
                        local.insert(i.name.clone(), t.clone());
                        t
                    }
                };
                new.push(Index::new(to, i.variance));
            }
        }
        Ok(n.with_own_indices(new))
    })
}

pub(crate) fn check_rule_shape(lhs: &Expr, rhs: &Expr, reg: &Registry) -> Result<()> {
    let names = |e: &Expr| -> Result<BTreeSet<String>> {
        Ok(free_indices(e, reg)?.into_iter().map(|i| i.name).collect())
    };
    if rhs.is_zero() {
        return Ok(());
    }
    let l = names(lhs)?;
    let r = names(rhs)?;
    if l != r {
        let show = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
        return Err(Error::RuleShape(format!(
            "pattern has free indices [{}] but replacement has [{}]",
            show(&l),
            show(&r)
        )));
    }
    Ok(())
}

/// Replaces every non-overlapping occurrence of `lhs` in `e` by the
/// instantiated `rhs`, innermost first, left to right.
pub fn match_replace(e: &Expr, lhs: &Expr, rhs: &Expr, reg: &Registry) -> Result<Expr> {
    check_rule_shape(lhs, rhs, reg)?;
    map_top_terms(e, &mut |term| {
        let mut fresh = FreshNames::avoiding(index_names(term));
        Ok(replace_in(term, lhs, rhs, reg, &mut fresh)?.0)
    })
}

fn replace_in(
    node: &Expr,
    lhs: &Expr,
    rhs: &Expr,
    reg: &Registry,
    fresh: &mut FreshNames,
) -> Result<(Expr, bool)> {
    let mut any = false;
    let mut kids = Vec::new();
    for c in node.children() {
        let (k, hit) = replace_in(c, lhs, rhs, reg, fresh)?;
        any |= hit;
        kids.push(k);
    }
    if any {
        return Ok((node.with_children(kids), true));
    }
    match match_pattern(lhs, node, reg) {
        Some(b) => Ok((instantiate(rhs, &b, fresh, reg)?, true)),
        None => Ok((node.clone(), false)),
    }
}
