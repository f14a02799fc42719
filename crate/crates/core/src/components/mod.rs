//! Explicit components: metric completion, expansion of index sums over
//! coordinate values, and the curvature compositions built on them.

use std::collections::BTreeMap;
use std::ops::Neg;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::expr::{dummies, free_indices, ComponentEntry, Components, Expr, Index, Variance};
use crate::kernel;
use crate::notation::parse_expression;
use crate::properties::{Position, Registry};
use crate::rewrite::substitute;

/// One assignment `head_{values} = value`.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleEntry {
    pub head: String,
    pub variances: Vec<Variance>,
    pub values: Vec<String>,
    pub value: Expr,
}

impl RuleEntry {
    pub fn atom(&self) -> Expr {
        Expr::tensor(
            self.head.clone(),
            self.variances
                .iter()
                .zip(&self.values)
                .map(|(v, n)| Index::new(n.clone(), *v))
                .collect(),
        )
    }
}

/// Sparse component assignments; unlisted tuples are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComponentRules {
    entries: Vec<RuleEntry>,
}

impl ComponentRules {
    /// Reads a list of equations `T_{x y} = value`, an equation with a
    /// component table on the right, or a bare table.
    pub fn from_expr(e: &Expr, reg: &Registry) -> Result<Self> {
        let mut rules = ComponentRules::default();
        rules.absorb(e, reg)?;
        Ok(rules)
    }

    fn absorb(&mut self, e: &Expr, reg: &Registry) -> Result<()> {
        match e {
            Expr::List(xs) => xs.iter().try_for_each(|x| self.absorb(x, reg)),
            Expr::Components(c) => {
                for entry in &c.entries {
                    self.insert(RuleEntry {
                        head: c.head.clone(),
                        variances: c.indices.iter().map(|i| i.variance).collect(),
                        values: entry.values.clone(),
                        value: entry.value.clone(),
                    });
                }
                Ok(())
            }
            Expr::Equation(_, r) if matches!(**r, Expr::Components(_)) => self.absorb(r, reg),
            Expr::Equation(l, r) => match &**l {
                Expr::Atom { name, indices }
                    if !indices.is_empty()
                        && indices.iter().all(|i| reg.is_coordinate(&i.name)) =>
                {
                    self.insert(RuleEntry {
                        head: name.clone(),
                        variances: indices.iter().map(|i| i.variance).collect(),
                        values: indices.iter().map(|i| i.name.clone()).collect(),
                        value: (**r).clone(),
                    });
                    Ok(())
                }
                _ => Err(Error::args(
                    "components",
                    "assignments need a tensor with coordinate indices on the left",
                )),
            },
            _ => Err(Error::args(
                "components",
                "expected a list of component assignments",
            )),
        }
    }

    /// Adds an entry, replacing any previous one for the same object.
    pub fn insert(&mut self, entry: RuleEntry) {
        match self.entries.iter_mut().find(|e| {
            e.head == entry.head && e.variances == entry.variances && e.values == entry.values
        }) {
            Some(old) => *old = entry,
            None => self.entries.push(entry),
        }
    }

    pub fn entries(&self) -> &[RuleEntry] {
        &self.entries
    }

    pub fn has_head(&self, head: &str) -> bool {
        self.entries.iter().any(|e| e.head == head)
    }

    fn exact(&self, head: &str, variances: &[Variance], values: &[String]) -> Option<&Expr> {
        self.entries
            .iter()
            .find(|e| e.head == head && e.variances == variances && e.values == values)
            .map(|e| &e.value)
    }

    /// Component of a concrete atom such as `g_{θθ}`, using the declared
    /// slot symmetry of two-slot objects. `None` when the tuple is not
    /// listed.
    pub fn lookup(&self, atom: &Expr, reg: &Registry) -> Option<Expr> {
        let Expr::Atom { name, indices } = atom else {
            return None;
        };
        let variances: Vec<Variance> = indices.iter().map(|i| i.variance).collect();
        let values: Vec<String> = indices.iter().map(|i| i.name.clone()).collect();
        if let Some(v) = self.exact(name, &variances, &values) {
            return Some(v.clone());
        }
        if indices.len() == 2 {
            let sym = reg.symmetry(atom)?;
            let swapped = [values[1].clone(), values[0].clone()];
            let sv = [variances[1], variances[0]];
            let v = self.exact(name, &sv, &swapped)?;
            return Some(if sym < 0 { v.clone().neg() } else { v.clone() });
        }
        None
    }

    pub fn to_expr(&self) -> Expr {
        Expr::list(
            self.entries
                .iter()
                .map(|e| Expr::equation(e.atom(), e.value.clone()))
                .collect(),
        )
    }
}

fn first_pattern<'a>(reg: &'a Registry, property: &str) -> Result<&'a Expr> {
    reg.patterns_with(property)
        .into_iter()
        .next()
        .ok_or_else(|| Error::MissingProperty(format!("no object is declared {property}")))
}

fn cofactor_det(m: &[Vec<Expr>]) -> Result<Expr> {
    let n = m.len();
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut terms = Vec::new();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        terms.push(Expr::product([
            Expr::num(sign),
            m[0][j].clone(),
            cofactor_det(&minor(m, 0, j))?,
        ]));
    }
    kernel::simplify(&Expr::sum(terms))
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// Adds the components of the inverse metric named by `pattern` (which
/// must carry InverseMetric), computed by cofactor expansion.
pub fn complete(rules: &ComponentRules, pattern: &Expr, reg: &Registry) -> Result<ComponentRules> {
    let Expr::Atom {
        name: inv_head,
        indices: inv_ix,
    } = pattern
    else {
        return Err(Error::args(
            "complete",
            "expected an inverse metric such as g^{a b}",
        ));
    };
    if !reg.has(pattern, "InverseMetric") {
        return Err(Error::MissingProperty(format!(
            "{inv_head} is not declared InverseMetric"
        )));
    }
    let metric = first_pattern(reg, "Metric")?;
    let Expr::Atom {
        name: head,
        indices: mix,
    } = metric
    else {
        unreachable!("metrics are two-slot atoms")
    };
    let values = reg.index_values(&inv_ix[0].name)?;
    let n = values.len();
    let at = |a: &str, b: &str| -> Expr {
        let atom = Expr::tensor(
            head.clone(),
            vec![
                Index::new(a, mix[0].variance),
                Index::new(b, mix[1].variance),
            ],
        );
        rules.lookup(&atom, reg).unwrap_or_else(Expr::zero)
    };
    let m: Vec<Vec<Expr>> = values
        .iter()
        .map(|a| values.iter().map(|b| at(a, b)).collect())
        .collect();
    let det = cofactor_det(&m)?;
    if det.is_zero() {
        return Err(Error::SingularMetric);
    }
    let inv_det = Expr::pow(det, Expr::num(-1));
    let mut out = rules.clone();
    for i in 0..n {
        for j in 0..n {
            let cof = if n == 1 {
                Expr::one()
            } else {
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                Expr::product([Expr::num(sign), cofactor_det(&minor(&m, j, i))?])
            };
            let v = kernel::simplify(&Expr::product([cof, inv_det.clone()]))?;
            if !v.is_zero() {
                out.insert(RuleEntry {
                    head: inv_head.clone(),
                    variances: inv_ix.iter().map(|i| i.variance).collect(),
                    values: vec![values[i].clone(), values[j].clone()],
                    value: v,
                });
            }
        }
    }
    Ok(out)
}

struct Evaluator<'a> {
    rules: &'a ComponentRules,
    reg: &'a Registry,
}

impl Evaluator<'_> {
    fn values_of(&self, ix: &Index) -> Result<Vec<String>> {
        if self.reg.position_free(&ix.name) || !self.reg.is_declared_index(&ix.name) {
            return Err(Error::CannotEnumerate(ix.name.clone()));
        }
        self.reg
            .index_values(&ix.name)
            .map_err(|_| Error::CannotEnumerate(ix.name.clone()))
    }

    fn resolve(&self, ix: &Index, env: &BTreeMap<String, String>) -> Result<String> {
        match env.get(&ix.name) {
            Some(v) => Ok(v.clone()),
            None if self.reg.is_coordinate(&ix.name) => Ok(ix.name.clone()),
            None => Err(Error::CannotEnumerate(ix.name.clone())),
        }
    }

    /// One term with its own dummy pairs summed over their values.
    fn term(&self, t: &Expr, env: &BTreeMap<String, String>) -> Result<Expr> {
        if matches!(t, Expr::Sum(_)) {
            return self.node(t, env);
        }
        let ds = dummies(t, self.reg)?;
        if ds.is_empty() {
            return self.node(t, env);
        }
        let ranges = ds
            .iter()
            .map(|d| self.values_of(&Index::lower(d.clone())))
            .collect::<Result<Vec<_>>>()?;
        let mut parts = Vec::new();
        for combo in ranges.into_iter().multi_cartesian_product() {
            let mut inner = env.clone();
            inner.extend(ds.iter().cloned().zip(combo));
            parts.push(self.node(t, &inner)?);
        }
        kernel::simplify(&Expr::sum(parts))
    }

    fn node(&self, e: &Expr, env: &BTreeMap<String, String>) -> Result<Expr> {
        Ok(match e {
            Expr::Num(_) => e.clone(),
            Expr::Atom { indices, .. } if indices.is_empty() => e.clone(),
            Expr::Atom { name, indices } => {
                let concrete = Expr::tensor(
                    name.clone(),
                    indices
                        .iter()
                        .map(|i| Ok(Index::new(self.resolve(i, env)?, i.variance)))
                        .collect::<Result<Vec<_>>>()?,
                );
                match self.rules.lookup(&concrete, self.reg) {
                    Some(v) => v,
                    None if self.rules.has_head(name) => Expr::zero(),
                    None => return Err(Error::UnknownHead(name.clone())),
                }
            }
            Expr::Components(c) => {
                let values = c
                    .indices
                    .iter()
                    .map(|i| self.resolve(i, env))
                    .collect::<Result<Vec<_>>>()?;
                c.get(&values).cloned().unwrap_or_else(Expr::zero)
            }
            Expr::Sum(ts) => kernel::simplify(&Expr::sum(
                ts.iter()
                    .map(|t| self.term(t, env))
                    .collect::<Result<Vec<_>>>()?,
            ))?,
            Expr::Prod(fs) => {
                let mut out = Vec::with_capacity(fs.len());
                for f in fs {
                    let v = self.node(f, env)?;
                    if v.is_zero() {
                        return Ok(Expr::zero());
                    }
                    out.push(v);
                }
                Expr::product(out)
            }
            Expr::Pow { base, exp } => Expr::pow(self.node(base, env)?, self.node(exp, env)?),
            Expr::Func { name, arg } => Expr::func(name.clone(), self.node(arg, env)?),
            Expr::Deriv { indices, arg } => {
                let mut v = kernel::simplify(&self.node(arg, env)?)?;
                for i in indices {
                    v = kernel::diff(&v, &self.resolve(i, env)?)?;
                }
                v
            }
            other => return Err(Error::NotScalar(crate::notation::print_plain(other))),
        })
    }

    fn table(&self, e: &Expr, head: &str, slots: &[Index]) -> Result<Expr> {
        if slots.is_empty() {
            return kernel::simplify(&self.term(e, &BTreeMap::new())?);
        }
        let ranges = slots
            .iter()
            .map(|i| self.values_of(i))
            .collect::<Result<Vec<_>>>()?;
        let mut entries = Vec::new();
        for combo in ranges.into_iter().multi_cartesian_product() {
            let env: BTreeMap<String, String> = slots
                .iter()
                .map(|i| i.name.clone())
                .zip(combo.iter().cloned())
                .collect();
            let v = kernel::simplify(&self.term(e, &env)?)?;
            if !v.is_zero() {
                entries.push(ComponentEntry {
                    values: combo,
                    value: v,
                });
            }
        }
        if entries.is_empty() {
            return Ok(Expr::zero());
        }
        Ok(Expr::components(Components {
            head: head.to_string(),
            indices: slots.to_vec(),
            entries,
        }))
    }
}

/// Expands index sums over declared values, differentiates and simplifies
/// component by component. Equations keep their left-hand side when
/// `rhs_only` is set; other targets become a table headed `Box`.
pub fn evaluate(
    target: &Expr,
    rules: &ComponentRules,
    rhs_only: bool,
    reg: &Registry,
) -> Result<Expr> {
    let ev = Evaluator { rules, reg };
    match target {
        Expr::Equation(l, r) => {
            let (head, slots) = match &**l {
                Expr::Atom { name, indices } => (name.clone(), indices.clone()),
                other => ("Box".to_string(), free_indices(other, reg)?),
            };
            let rhs = ev.table(r, &head, &slots)?;
            let lhs = if rhs_only {
                (**l).clone()
            } else {
                ev.table(l, &head, &slots)?
            };
            Ok(Expr::equation(lhs, rhs))
        }
        other => {
            let slots = free_indices(other, reg)?;
            ev.table(other, "Box", &slots)
        }
    }
}

const GREEK_SLOTS: [&str; 9] = [
    "alpha", "beta", "gamma", "delta", "rho", "sigma", "mu", "nu", "lambda",
];

/// Registry for the built-in curvature definitions: the Greek slot names
/// range over the metric's coordinate values.
fn curvature_registry(reg: &Registry) -> Result<(Registry, String, String)> {
    let metric = first_pattern(reg, "Metric")?;
    let inverse = first_pattern(reg, "InverseMetric")?;
    let values = reg.index_values(&metric.own_indices()[0].name)?;
    let mut r = reg.clone();
    let names: Vec<String> = GREEK_SLOTS.iter().map(|s| s.to_string()).collect();
    r.declare_indices(&names, Position::Fixed, Some(values))?;
    let head = |e: &Expr| match e {
        Expr::Atom { name, .. } => name.clone(),
        _ => unreachable!("metrics are atoms"),
    };
    Ok((r, head(metric), head(inverse)))
}

fn with_heads(src: &str, metric: &str, inverse: &str) -> Expr {
    parse_expression(src)
        .expect("built-in definition parses")
        .map_bottom_up(&mut |n| match n {
            Expr::Atom { name, indices } if name == "G" || name == "H" => {
                Expr::tensor(if name == "G" { metric } else { inverse }, indices)
            }
            other => other,
        })
}

fn ensure_inverse(rules: &ComponentRules, reg: &Registry, inverse: &str) -> Result<ComponentRules> {
    let have = rules
        .entries()
        .iter()
        .any(|e| e.head == inverse && e.variances.iter().all(|v| *v == Variance::Upper));
    if have {
        return Ok(rules.clone());
    }
    complete(rules, first_pattern(reg, "InverseMetric")?, reg)
}

/// `Γ^α_{μν} = ½ g^{αβ}(∂_ν g_{βμ} + ∂_μ g_{βν} − ∂_β g_{μν})` as a table.
pub fn christoffel(rules: &ComponentRules, reg: &Registry) -> Result<Expr> {
    let (r, g, h) = curvature_registry(reg)?;
    let rules = ensure_inverse(rules, &r, &h)?;
    let def = with_heads(
        r"\Gamma^{\alpha}_{\mu\nu} = 1/2 H^{\alpha\beta} (\partial_{\nu}{G_{\beta\mu}} + \partial_{\mu}{G_{\beta\nu}} - \partial_{\beta}{G_{\mu\nu}})",
        &g,
        &h,
    );
    evaluate(&def, &rules, true, &r)
}

/// Riemann tensor `R^ρ_{σμν}` in declared slot order.
pub fn riemann_pipeline(rules: &ComponentRules, reg: &Registry) -> Result<Expr> {
    let (r, _, h) = curvature_registry(reg)?;
    let rules = ensure_inverse(rules, &r, &h)?;
    let gamma = christoffel(&rules, reg)?;
    let def = parse_expression(
        r"R^{\rho}_{\sigma\mu\nu} = \partial_{\mu}{\Gamma^{\rho}_{\sigma\nu}} - \partial_{\nu}{\Gamma^{\rho}_{\sigma\mu}} + \Gamma^{\rho}_{\beta\mu} \Gamma^{\beta}_{\sigma\nu} - \Gamma^{\rho}_{\beta\nu} \Gamma^{\beta}_{\sigma\mu}",
    )?;
    let def = substitute(&def, &gamma, &r)?;
    evaluate(&def, &rules, true, &r)
}

/// Ricci tensor `R_{σν} = R^ρ_{σρν}` and scalar curvature
/// `R = R_{σν} g^{σν}`.
pub fn ricci_and_scalar(rules: &ComponentRules, reg: &Registry) -> Result<(Expr, Expr)> {
    let (r, g, h) = curvature_registry(reg)?;
    let rules = ensure_inverse(rules, &r, &h)?;
    let riemann = riemann_pipeline(&rules, reg)?;
    let ricci_def = parse_expression(r"R_{\sigma\nu} = R^{\rho}_{\sigma\rho\nu}")?;
    let ricci = evaluate(&substitute(&ricci_def, &riemann, &r)?, &rules, true, &r)?;
    let scalar_def = with_heads(r"R = R_{\sigma\nu} H^{\sigma\nu}", &g, &h);
    let scalar = evaluate(&substitute(&scalar_def, &ricci, &r)?, &rules, true, &r)?;
    let value = match scalar {
        Expr::Equation(_, v) => *v,
        other => other,
    };
    Ok((ricci, value))
}
