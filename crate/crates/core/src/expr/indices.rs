//! Free/dummy index analysis and dummy renaming.
//!
//! Index scopes: a dummy pair belongs to the innermost sum term that
//! contains both occurrences. Products, derivatives, accents, functions,
//! powers and integrals are transparent; a nested sum contributes its
//! free indices to the enclosing term. Indices named after declared
//! coordinates are concrete component labels and take no part in this
//! bookkeeping.

use std::collections::{BTreeMap, BTreeSet};

use super::{Expr, Index, Variance};
use crate::error::{Error, Result};
use crate::properties::Registry;

/// Separator between the original name and the counter of a temporary
/// dummy name produced by [`uniquify_dummies`].
pub const DUMMY_MARK: char = '\u{1}';

pub(crate) fn base_name(name: &str) -> &str {
    name.split(DUMMY_MARK).next().unwrap_or(name)
}

/// Index occurrences of a single term in first-appearance order.
pub fn occurrences(term: &Expr, reg: &Registry) -> Result<Vec<Index>> {
    let mut out = Vec::new();
    collect(term, reg, &mut out)?;
    Ok(out)
}

fn collect(e: &Expr, reg: &Registry, out: &mut Vec<Index>) -> Result<()> {
    match e {
        Expr::Num(_) | Expr::Wildcard => {}
        Expr::Atom { indices, .. } => push_abstract(indices, reg, out),
        Expr::Components(c) => push_abstract(&c.indices, reg, out),
        Expr::Deriv { indices, arg } => {
            push_abstract(indices, reg, out);
            collect(arg, reg, out)?;
        }
        Expr::Sum(_) | Expr::Equation(..) | Expr::Rule(..) => {
            out.extend(free_indices(e, reg)?);
        }
        Expr::List(_) => {}
        Expr::Accent { .. }
        | Expr::Func { .. }
        | Expr::Pow { .. }
        | Expr::Integral { .. }
        | Expr::Prod(_) => {
            for c in e.children() {
                collect(c, reg, out)?;
            }
        }
    }
    Ok(())
}

fn push_abstract(indices: &[Index], reg: &Registry, out: &mut Vec<Index>) {
    out.extend(
        indices
            .iter()
            .filter(|i| !reg.is_coordinate(&i.name))
            .cloned(),
    );
}

struct TermIndices {
    free: Vec<Index>,
    dummies: Vec<String>,
}

fn analyse_term(term: &Expr, reg: &Registry) -> Result<TermIndices> {
    let occ = occurrences(term, reg)?;
    let mut seen: BTreeMap<&str, Vec<&Index>> = BTreeMap::new();
    let mut order: Vec<&str> = Vec::new();
    for i in &occ {
        let v = seen.entry(&i.name).or_default();
        if v.is_empty() {
            order.push(&i.name);
        }
        v.push(i);
    }
    let mut free = Vec::new();
    let mut dummies = Vec::new();
    for name in order {
        let v = &seen[name];
        match v.len() {
            1 => free.push(v[0].clone()),
            2 => {
                if v[0].variance == v[1].variance && reg.position_free(base_name(name)) {
                    return Err(Error::MalformedTerm(format!(
                        "index {} appears twice with the same variance",
                        base_name(name)
                    )));
                }
                dummies.push(name.to_string());
            }
            n => {
                return Err(Error::MalformedTerm(format!(
                    "index {} appears {} times in one term",
                    base_name(name),
                    n
                )))
            }
        }
    }
    Ok(TermIndices { free, dummies })
}

/// Free indices of an expression, in first-appearance order.
///
/// For sums every term must carry the same free set; for equations and
/// rules the left-hand side decides.
pub fn free_indices(e: &Expr, reg: &Registry) -> Result<Vec<Index>> {
    match e {
        Expr::Sum(terms) => {
            let mut first: Option<(Vec<Index>, BTreeSet<Index>)> = None;
            for t in terms {
                let f = free_indices(t, reg)?;
                let set: BTreeSet<Index> = f.iter().cloned().collect();
                match &first {
                    None => first = Some((f, set)),
                    Some((_, s)) if *s == set => {}
                    Some((f0, _)) => {
                        return Err(Error::InconsistentSum(format!(
                            "terms carry free indices [{}] and [{}]",
                            show(f0),
                            show(&f)
                        )))
                    }
                }
            }
            Ok(first.map(|(f, _)| f).unwrap_or_default())
        }
        Expr::Equation(l, _) | Expr::Rule(l, _) => free_indices(l, reg),
        Expr::List(_) => Ok(Vec::new()),
        term => Ok(analyse_term(term, reg)?.free),
    }
}

fn show(ix: &[Index]) -> String {
    ix.iter()
        .map(|i| {
            format!(
                "{}{}",
                if i.variance == Variance::Upper {
                    "^"
                } else {
                    "_"
                },
                base_name(&i.name)
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Dummy names bound at the level of a single term (not inside nested
/// sums), in first-appearance order.
pub fn dummies(term: &Expr, reg: &Registry) -> Result<Vec<String>> {
    Ok(analyse_term(term, reg)?.dummies)
}

/// Every index name occurring anywhere in the tree.
pub fn index_names(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    e.any_node(&mut |n| {
        for i in n.own_indices() {
            out.insert(i.name.clone());
        }
        false
    });
    out
}

/// Renames index names everywhere in `e` (all scopes).
pub fn rename_indices(e: &Expr, map: &BTreeMap<String, String>) -> Expr {
    if map.is_empty() {
        return e.clone();
    }
    e.map_bottom_up(&mut |n| {
        let own = n.own_indices();
        if own.iter().any(|i| map.contains_key(&i.name)) {
            let new = own
                .iter()
                .map(|i| match map.get(&i.name) {
                    Some(to) => Index::new(to.clone(), i.variance),
                    None => i.clone(),
                })
                .collect();
            n.with_own_indices(new)
        } else {
            n
        }
    })
}

/// Applies `f` to every top-level term: the terms of a sum, both sides
/// of an equation or rule, the elements of a list.
pub(crate) fn map_top_terms(e: &Expr, f: &mut impl FnMut(&Expr) -> Result<Expr>) -> Result<Expr> {
    match e {
        Expr::Sum(ts) => Ok(Expr::sum(
            ts.iter().map(&mut *f).collect::<Result<Vec<_>>>()?,
        )),
        Expr::Equation(l, r) => Ok(Expr::equation(map_top_terms(l, f)?, map_top_terms(r, f)?)),
        Expr::Rule(l, r) => Ok(Expr::rule(map_top_terms(l, f)?, map_top_terms(r, f)?)),
        Expr::List(xs) => Ok(Expr::List(
            xs.iter()
                .map(|x| map_top_terms(x, f))
                .collect::<Result<Vec<_>>>()?,
        )),
        other => f(other),
    }
}

/// Applies `f` to each term of every sum nested in `term` (outermost
/// nested sums only; `f` handles deeper levels itself).
pub(crate) fn map_nested_sum_terms(
    term: &Expr,
    f: &mut impl FnMut(&Expr) -> Result<Expr>,
) -> Result<Expr> {
    match term {
        Expr::Sum(ts) => Ok(Expr::sum(
            ts.iter().map(&mut *f).collect::<Result<Vec<_>>>()?,
        )),
        other => other.try_map_children(|c| map_nested_sum_terms(c, f)),
    }
}

/// Gives every dummy pair in the tree a globally unique temporary name
/// (`original` + [`DUMMY_MARK`] + counter), so that later renamings
/// cannot capture indices from other scopes.
pub fn uniquify_dummies(e: &Expr, reg: &Registry) -> Result<Expr> {
    let mut counter = 0usize;
    map_top_terms(e, &mut |t| uniquify_term(t, reg, &mut counter))
}

fn uniquify_term(term: &Expr, reg: &Registry, counter: &mut usize) -> Result<Expr> {
    let ds = dummies(term, reg)?;
    let map: BTreeMap<String, String> = ds
        .into_iter()
        .map(|d| {
            *counter += 1;
            let fresh = format!("{}{}{}", base_name(&d), DUMMY_MARK, counter);
            (d, fresh)
        })
        .collect();
    let renamed = rename_indices(term, &map);
    map_nested_sum_terms(&renamed, &mut |t| uniquify_term(t, reg, counter))
}

/// Renames dummy pairs, term by term, to the first unused names of their
/// index pool in first-appearance order. Free indices are untouched.
pub fn rename_dummies(e: &Expr, reg: &Registry) -> Result<Expr> {
    let u = uniquify_dummies(e, reg)?;
    map_top_terms(&u, &mut |t| rename_term(t, reg, &BTreeSet::new()))
}

fn rename_term(term: &Expr, reg: &Registry, taken: &BTreeSet<String>) -> Result<Expr> {
    let info = analyse_term(term, reg)?;
    let mut avoid: BTreeSet<String> = taken.clone();
    avoid.extend(info.free.iter().map(|i| i.name.clone()));
    let mut map = BTreeMap::new();
    for d in &info.dummies {
        let base = base_name(d);
        let pool = reg.index_pool(base);
        let pick = pool
            .into_iter()
            .find(|n| !avoid.contains(n))
            .ok_or_else(|| Error::OutOfIndices(base.to_string()))?;
        avoid.insert(pick.clone());
        map.insert(d.clone(), pick);
    }
    let renamed = rename_indices(term, &map);
    map_nested_sum_terms(&renamed, &mut |t| rename_term(t, reg, &avoid))
}
