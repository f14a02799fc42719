//! Canonical form of index-carrying terms.
//!
//! Per term, every relabelling of the dummy pairs onto the first free
//! pool names is tried, together with every variance swap of
//! position-free pairs. Each candidate has its (anti)symmetric slots and
//! product factors sorted; the least candidate under the expression order
//! wins. A candidate reachable with both signs means the term is zero.
//! Terms whose dummies run through a nested sum are left unrelabelled;
//! only the sums inside them are canonicalised.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Neg;

use itertools::Itertools;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{
    base_name, dummies, factor_order, occurrences, rename_indices, term_order, uniquify_dummies,
    Expr, Index,
};
use crate::properties::Registry;
use crate::Rational;

/// Largest number of index slots in a term that canonicalisation will
/// search over.
pub const MAX_INDICES: usize = 8;

pub fn canonicalise(e: &Expr, reg: &Registry) -> Result<Expr> {
    let u = uniquify_dummies(e, reg)?;
    top(&u, reg)
}

fn top(e: &Expr, reg: &Registry) -> Result<Expr> {
    match e {
        Expr::Sum(ts) => sorted_sum(ts, reg, &BTreeSet::new()),
        Expr::Equation(l, r) => Ok(Expr::equation(top(l, reg)?, top(r, reg)?)),
        Expr::Rule(l, r) => Ok(Expr::rule(top(l, reg)?, top(r, reg)?)),
        Expr::List(xs) => Ok(Expr::List(
            xs.iter().map(|x| top(x, reg)).collect::<Result<_>>()?,
        )),
        t => term(t, reg, &BTreeSet::new()),
    }
}

fn sorted_sum(ts: &[Expr], reg: &Registry, avoid: &BTreeSet<String>) -> Result<Expr> {
    let mut out = ts
        .iter()
        .map(|t| term(t, reg, avoid))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(term_order);
    Ok(Expr::sum(out))
}

fn has_nested_sum(e: &Expr) -> bool {
    match e {
        Expr::Sum(_) => true,
        Expr::Components(_) | Expr::Atom { .. } | Expr::Num(_) => false,
        other => other.children().into_iter().any(has_nested_sum),
    }
}

fn level_names(t: &Expr, reg: &Registry) -> Result<BTreeSet<String>> {
    Ok(occurrences(t, reg)?.into_iter().map(|i| i.name).collect())
}

fn term(t: &Expr, reg: &Registry, avoid: &BTreeSet<String>) -> Result<Expr> {
    let ds = dummies(t, reg)?;
    let occ = occurrences(t, reg)?;
    let mut taken: BTreeSet<String> = avoid.clone();
    taken.extend(
        occ.iter()
            .map(|i| i.name.clone())
            .filter(|n| !ds.contains(n)),
    );
    if ds.is_empty() || has_nested_sum(t) {
        let mut map = BTreeMap::new();
        for d in &ds {
            let pick = reg
                .index_pool(base_name(d))
                .into_iter()
                .find(|n| !taken.contains(n))
                .ok_or_else(|| Error::OutOfIndices(base_name(d).to_string()))?;
            taken.insert(pick.clone());
            map.insert(d.clone(), pick);
        }
        let renamed = rename_indices(t, &map);
        let mut inner = avoid.clone();
        inner.extend(level_names(&renamed, reg)?);
        return normalize(&renamed, reg, &inner);
    }
    if occ.len() > MAX_INDICES {
        return Err(Error::TooManyIndices(occ.len()));
    }

    // dummies sharing a name pool compete for the same target names
    let mut groups: BTreeMap<Vec<String>, Vec<String>> = BTreeMap::new();
    for d in &ds {
        groups
            .entry(reg.index_pool(base_name(d)))
            .or_default()
            .push(d.clone());
    }
    let mut targets: Vec<(Vec<String>, Vec<String>)> = Vec::new();
    for (pool, members) in groups {
        let names: Vec<String> = pool
            .iter()
            .filter(|n| !taken.contains(*n))
            .take(members.len())
            .cloned()
            .collect();
        if names.len() < members.len() {
            return Err(Error::OutOfIndices(base_name(&members[0]).to_string()));
        }
        taken.extend(names.iter().cloned());
        targets.push((members, names));
    }
    let flippable: Vec<String> = ds
        .iter()
        .filter(|d| reg.position_free(base_name(d)))
        .cloned()
        .collect();

    let assignments = targets
        .iter()
        .map(|(members, names)| {
            names
                .iter()
                .cloned()
                .permutations(names.len())
                .map(|perm| members.iter().cloned().zip(perm).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        })
        .multi_cartesian_product();

    let mut best: Option<(Expr, Rational)> = None;
    let mut vanishes = false;
    for assign in assignments {
        let map: BTreeMap<String, String> = assign.into_iter().flatten().collect();
        let renamed = rename_indices(t, &map);
        let new_flippable: Vec<String> = flippable.iter().map(|d| map[d].clone()).collect();
        let mut inner = avoid.clone();
        inner.extend(level_names(&renamed, reg)?);
        for flips in new_flippable.iter().powerset() {
            let cand = flip_names(&renamed, &flips);
            let (c, rest) = normalize(&cand, reg, &inner)?.split_coefficient();
            if c.is_zero() {
                return Ok(Expr::zero());
            }
            match &best {
                Some((b, bc)) if *b == rest => {
                    if *bc != c {
                        vanishes = true;
                    }
                }
                Some((b, _)) if *b < rest => {}
                _ => {
                    best = Some((rest, c));
                    vanishes = false;
                }
            }
        }
    }
    if vanishes {
        return Ok(Expr::zero());
    }
    let (rest, c) = best.expect("at least one candidate");
    Ok(Expr::product([Expr::Num(c), rest]))
}

fn flip_names(e: &Expr, names: &[&String]) -> Expr {
    if names.is_empty() {
        return e.clone();
    }
    e.map_bottom_up(&mut |n| {
        let own = n.own_indices();
        if own.iter().any(|i| names.contains(&&i.name)) {
            let new = own
                .iter()
                .map(|i| {
                    if names.contains(&&i.name) {
                        i.flipped()
                    } else {
                        i.clone()
                    }
                })
                .collect();
            n.with_own_indices(new)
        } else {
            n
        }
    })
}

/// Sorts symmetric slots and product factors throughout a term and
/// canonicalises nested sums, pulling signs to the front.
fn normalize(e: &Expr, reg: &Registry, avoid: &BTreeSet<String>) -> Result<Expr> {
    Ok(match e {
        Expr::Sum(ts) => sorted_sum(ts, reg, avoid)?,
        Expr::Atom { name, indices } if !indices.is_empty() => match reg.symmetry(e) {
            Some(s) => sort_slots(name, indices, s),
            None => e.clone(),
        },
        Expr::Accent { name, arg } => {
            let (c, rest) = normalize(arg, reg, avoid)?.split_coefficient();
            if c.is_zero() {
                return Ok(Expr::zero());
            }
            Expr::product([Expr::Num(c), Expr::accent(name.clone(), rest)])
        }
        Expr::Prod(fs) => {
            let mut out = fs
                .iter()
                .map(|f| normalize(f, reg, avoid))
                .collect::<Result<Vec<_>>>()?;
            let p = Expr::product(out.drain(..));
            match p {
                Expr::Prod(mut gs) => {
                    gs.sort_by(factor_order);
                    Expr::product(gs)
                }
                other => other,
            }
        }
        other => other.try_map_children(|c| normalize(c, reg, avoid))?,
    })
}

fn sort_slots(name: &str, indices: &[Index], sym: i8) -> Expr {
    let mut ix = indices.to_vec();
    let mut swaps = 0usize;
    for i in 0..ix.len() {
        for j in 0..ix.len() - 1 - i {
            if ix[j] > ix[j + 1] {
                ix.swap(j, j + 1);
                swaps += 1;
            }
        }
    }
    if sym < 0 && ix.windows(2).any(|w| w[0].name == w[1].name) {
        return Expr::zero();
    }
    let t = Expr::tensor(name.to_string(), ix);
    if sym < 0 && swaps % 2 == 1 {
        t.neg()
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_expression;
    use crate::properties::{Position, Property};
    use crate::rewrite::collect_terms;

    fn p(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    fn reg() -> Registry {
        let mut r = Registry::default();
        r.declare_indices(
            &["mu", "nu", "rho", "sigma"].map(String::from),
            Position::Free,
            None,
        )
        .unwrap();
        r.attach(&p(r"F_{\mu\nu}"), Property::AntiSymmetric)
            .unwrap();
        r.attach(&p(r"S_{\mu\nu}"), Property::Symmetric).unwrap();
        r
    }

    fn canon(s: &str) -> Expr {
        collect_terms(&canonicalise(&p(s), &reg()).unwrap())
    }

    #[test]
    fn antisymmetry() {
        assert_eq!(canon(r"F_{\nu\mu}"), p(r"-F_{\mu\nu}"));
        assert!(canon(r"F_{\mu\nu} + F_{\nu\mu}").is_zero());
        assert!(canon(r"F_{\mu\nu} S^{\mu\nu}").is_zero());
        assert!(canon(r"F_{\mu}^{\mu}").is_zero());
    }

    #[test]
    fn dummies_relabel() {
        let got = canon(
            r"\partial^{\rho}{A^{\sigma}} \partial_{\rho}{\delta{A_{\sigma}}} + \partial^{\mu}{A^{\nu}} \partial_{\mu}{\delta{A_{\nu}}}",
        );
        assert_eq!(
            got,
            p(r"2 \partial^{\mu}{A^{\nu}} \partial_{\mu}{\delta{A_{\nu}}}")
        );
        assert_eq!(canon(r"F_{\mu\nu} F^{\mu\nu}"), p(r"F^{\mu\nu} F_{\mu\nu}"));
    }

    #[test]
    fn idempotent() {
        let once =
            canon(r"A_{\rho} B^{\sigma} F_{\sigma}^{\rho} + C_{\mu} D^{\mu} (E_{\nu} G^{\nu} + H)");
        assert_eq!(collect_terms(&canonicalise(&once, &reg()).unwrap()), once);
    }

    #[test]
    fn nested_sum_terms_keep_readable_names() {
        let got = canon(r"A_{\rho} B^{\rho} (C_{\mu} + D_{\mu})");
        assert_eq!(got, p(r"A_{\nu} B^{\nu} (C_{\mu} + D_{\mu})"));
    }

    #[test]
    fn too_many_indices() {
        let e = p(r"A_{\mu\nu\rho\sigma} B^{\mu\nu\rho\sigma} C_{a} D^{a}");
        assert!(matches!(
            canonicalise(&e, &reg()),
            Err(Error::TooManyIndices(10))
        ));
    }
}
