//! Abstract-index rewriting: distribution, factor sorting, term
//! collection, canonicalisation, substitution, variation and integration
//! by parts.

mod canon;

use itertools::Itertools;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{
    check_rule_shape, factor_order, index_names, instantiate, map_top_terms, match_pattern,
    match_replace, Expr, FreshNames,
};
use crate::properties::Registry;
use crate::Rational;

pub use canon::canonicalise;

/// Multiplies out products of sums and pushes derivatives through sums,
/// recursively. Integrals keep their integrand as a single sum.
pub fn distribute(e: &Expr) -> Expr {
    e.map_bottom_up(&mut |n| match n {
        Expr::Prod(fs) if fs.iter().any(|f| matches!(f, Expr::Sum(_))) => {
            let choices: Vec<Vec<Expr>> = fs.iter().map(Expr::terms).collect();
            Expr::sum(
                choices
                    .into_iter()
                    .multi_cartesian_product()
                    .map(Expr::product),
            )
        }
        Expr::Deriv { indices, arg } if matches!(*arg, Expr::Sum(_)) => Expr::sum(
            arg.terms()
                .into_iter()
                .map(|t| Expr::deriv(indices.clone(), t)),
        ),
        other => other,
    })
}

/// Reorders the factors of every product into the fixed factor order.
pub fn sort_product(e: &Expr) -> Expr {
    e.map_bottom_up(&mut |n| match n {
        Expr::Prod(mut fs) => {
            fs.sort_by(factor_order);
            Expr::product(fs)
        }
        other => other,
    })
}

/// Merges terms that differ only in their rational coefficient, keeping
/// first-appearance order; zero terms disappear.
pub fn collect_terms(e: &Expr) -> Expr {
    e.map_bottom_up(&mut |n| match n {
        Expr::Sum(ts) => {
            let mut acc: Vec<(Expr, Rational)> = Vec::new();
            for t in ts {
                let (c, rest) = t.split_coefficient();
                match acc.iter_mut().find(|(r, _)| *r == rest) {
                    Some((_, sum)) => *sum += c,
                    None => acc.push((rest, c)),
                }
            }
            Expr::sum(
                acc.into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(r, c)| Expr::product([Expr::Num(c), r])),
            )
        }
        other => other,
    })
}

/// Splits a rule argument into (lhs, rhs) pairs: an equation, a rule
/// arrow, or a list of those.
fn rule_pairs(rule: &Expr) -> Result<Vec<(Expr, Expr)>> {
    match rule {
        Expr::Equation(l, r) | Expr::Rule(l, r) => Ok(vec![((**l).clone(), (**r).clone())]),
        Expr::List(xs) => xs.iter().map(rule_pairs).flatten_ok().collect(),
        _ => Err(Error::RuleShape(
            "expected an equation or a rule".to_string(),
        )),
    }
}

/// Replaces every match of the rule's left-hand side, including inside
/// derivatives and integrals. Lists of rules apply in order.
pub fn substitute(e: &Expr, rule: &Expr, reg: &Registry) -> Result<Expr> {
    let mut out = e.clone();
    for (l, r) in rule_pairs(rule)? {
        out = match_replace(&out, &l, &r, reg)?;
    }
    Ok(out)
}

/// First-order variation: every occurrence of the rule's left-hand side
/// is replaced once, products follow the Leibniz rule, and parts without
/// an occurrence vanish.
pub fn vary(e: &Expr, rule: &Expr, reg: &Registry) -> Result<Expr> {
    let pairs = rule_pairs(rule)?;
    let [(lhs, rhs)] = pairs.as_slice() else {
        return Err(Error::RuleShape("vary takes a single rule".to_string()));
    };
    check_rule_shape(lhs, rhs, reg)?;
    map_top_terms(e, &mut |t| {
        let mut fresh = FreshNames::avoiding(index_names(t));
        vary_node(t, lhs, rhs, reg, &mut fresh)
    })
}

fn vary_node(
    e: &Expr,
    lhs: &Expr,
    rhs: &Expr,
    reg: &Registry,
    fresh: &mut FreshNames,
) -> Result<Expr> {
    if let Some(b) = match_pattern(lhs, e, reg) {
        return instantiate(rhs, &b, fresh, reg);
    }
    Ok(match e {
        Expr::Sum(ts) => Expr::sum(
            ts.iter()
                .map(|t| vary_node(t, lhs, rhs, reg, fresh))
                .collect::<Result<Vec<_>>>()?,
        ),
        Expr::Prod(fs) => {
            let mut terms = Vec::new();
            for i in 0..fs.len() {
                let d = vary_node(&fs[i], lhs, rhs, reg, fresh)?;
                if d.is_zero() {
                    continue;
                }
                let mut f = fs.clone();
                f[i] = d;
                terms.push(Expr::product(f));
            }
            Expr::sum(terms)
        }
        Expr::Deriv { indices, arg } => {
            Expr::deriv(indices.clone(), vary_node(arg, lhs, rhs, reg, fresh)?)
        }
        Expr::Integral { body, var } => {
            Expr::integral(vary_node(body, lhs, rhs, reg, fresh)?, var.clone())
        }
        Expr::Accent { name, arg } => {
            let d = vary_node(arg, lhs, rhs, reg, fresh)?;
            if d.is_zero() {
                d
            } else {
                Expr::accent(name.clone(), d)
            }
        }
        Expr::Pow { base, exp } => match exp.as_num() {
            Some(n) => {
                let d = vary_node(base, lhs, rhs, reg, fresh)?;
                Expr::product([
                    Expr::Num(n.clone()),
                    Expr::pow(
                        (**base).clone(),
                        Expr::Num(n - Rational::from_integer(1.into())),
                    ),
                    d,
                ])
            }
            None => Expr::zero(),
        },
        _ => Expr::zero(),
    })
}

/// Inside every integral, moves derivatives off the factor matching
/// `marker` onto the rest of the term with a sign flip per index.
/// Boundary terms are dropped; derivatives of factors that do not depend
/// on the integration variable vanish.
pub fn integrate_by_parts(e: &Expr, marker: &Expr, reg: &Registry) -> Result<Expr> {
    Ok(e.map_bottom_up(&mut |n| match n {
        Expr::Integral { body, var } => {
            let terms = body
                .terms()
                .iter()
                .flat_map(|t| ibp_term(t, marker, &var, reg))
                .collect::<Vec<_>>();
            Expr::integral(Expr::sum(terms), var)
        }
        other => other,
    }))
}

fn contains_marker(e: &Expr, marker: &Expr, reg: &Registry) -> bool {
    e.any_node(&mut |n| match_pattern(marker, n, reg).is_some())
}

fn ibp_term(term: &Expr, marker: &Expr, var: &str, reg: &Registry) -> Vec<Expr> {
    let (c, rest) = term.split_coefficient();
    let fs = rest.factors();
    let hit = fs.iter().position(|f| match f {
        Expr::Deriv { arg, .. } => contains_marker(arg, marker, reg),
        _ => false,
    });
    let Some(i) = hit else {
        return vec![term.clone()];
    };
    let Expr::Deriv { indices, arg } = &fs[i] else {
        unreachable!()
    };
    let others: Vec<Expr> = fs
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, f)| f.clone())
        .collect();
    if others.is_empty() {
        return Vec::new();
    }
    let sign = if indices.len() % 2 == 0 {
        c.clone()
    } else {
        -c.clone()
    };
    let moved: Vec<Expr> = if indices.len() == 1 {
        (0..others.len())
            .filter(|&k| depends_on_var(&others[k], var, reg))
            .map(|k| {
                let mut g = others.clone();
                g[k] = Expr::deriv(indices.clone(), g[k].clone());
                Expr::product(g)
            })
            .collect()
    } else if others.iter().any(|f| depends_on_var(f, var, reg)) {
        vec![Expr::deriv(indices.clone(), Expr::product(others))]
    } else {
        Vec::new()
    };
    moved
        .into_iter()
        .flat_map(|m| {
            let t = Expr::product([Expr::Num(sign.clone()), (**arg).clone(), m]);
            ibp_term(&t, marker, var, reg)
        })
        .collect()
}

/// Whether some object in `e` is declared to depend on `var`.
fn depends_on_var(e: &Expr, var: &str, reg: &Registry) -> bool {
    e.any_node(&mut |n| match n {
        Expr::Atom { name, indices } if indices.is_empty() && name == var => true,
        Expr::Atom { .. } | Expr::Accent { .. } | Expr::Components(_) => reg
            .dependencies(n)
            .iter()
            .any(|d| d.as_symbol() == Some(var)),
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_expression;
    use crate::properties::{Position, Property};

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
        r.declare_coordinate("x");
        r.attach(&p(r"F_{\mu\nu}"), Property::AntiSymmetric)
            .unwrap();
        r.attach(&p(r"A_{\mu}"), Property::Depends(vec![p("x")]))
            .unwrap();
        r.attach(&p(r"f"), Property::Depends(vec![p("x")])).unwrap();
        r.attach(&p(r"g"), Property::Depends(vec![p("x")])).unwrap();
        r
    }

    #[test]
    fn distributes() {
        assert_eq!(distribute(&p("(a+b) c")), p("a c + b c"));
        assert_eq!(distribute(&p("((a+b)+c)(d+e)")).terms().len(), 6);
        assert_eq!(
            distribute(&p(r"\partial_{\mu}{A_{\nu} + B_{\nu}}")),
            p(r"\partial_{\mu}{A_{\nu}} + \partial_{\mu}{B_{\nu}}")
        );
    }

    #[test]
    fn sorts_and_collects() {
        assert_eq!(sort_product(&p("B A")), p("A B"));
        assert_eq!(sort_product(&p("3 A 2")), p("6 A"));
        assert_eq!(collect_terms(&p("2 x + 3 x")), p("5 x"));
        assert!(collect_terms(&p("x - x")).is_zero());
    }

    #[test]
    fn substitutes_lists_and_identity() {
        let r = reg();
        let e = p(r"A_{\mu} B^{\mu}");
        assert_eq!(substitute(&e, &p("x -> x"), &r).unwrap(), e);
        let got = substitute(&p("a + b"), &p("{a -> c, b -> d}"), &r).unwrap();
        assert_eq!(got, p("c + d"));
        assert!(matches!(
            substitute(&e, &p("A"), &r),
            Err(Error::RuleShape(_))
        ));
    }

    #[test]
    fn varies_by_leibniz() {
        let r = reg();
        let got = vary(
            &p(r"A_{\mu} A^{\mu}"),
            &p(r"A_{\mu} -> \delta{A_{\mu}}"),
            &r,
        )
        .unwrap();
        assert_eq!(got, p(r"\delta{A_{\mu}} A^{\mu} + A_{\mu} \delta{A^{\mu}}"));
        assert!(vary(&p("c"), &p(r"A_{\mu} -> \delta{A_{\mu}}"), &r)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn integrates_by_parts() {
        let r = reg();
        let got = integrate_by_parts(&p(r"\int{\partial_{\mu}{f} g}{x}"), &p("f"), &r).unwrap();
        assert_eq!(got, p(r"-\int{f \partial_{\mu}{g}}{x}"));
        let e = p(r"\int{f g}{x}");
        assert_eq!(integrate_by_parts(&e, &p("f"), &r).unwrap(), e);
        // derivative of a constant factor vanishes
        let got = integrate_by_parts(&p(r"\int{\partial_{\mu}{f} h}{x}"), &p("f"), &r).unwrap();
        assert!(got.is_zero());
    }
}
