//! Statement interpreter: labels, the last result `_`, the post-process
//! pipeline and property attachment.

use std::collections::BTreeMap;

use crate::components::{self, ComponentRules};
use crate::error::{Error, Result};
use crate::expr::{rename_dummies, Expr};
use crate::kernel;
use crate::notation::{
    parse_statement_at, print, split_statements, Arg, Statement, StatementKind, Style, Terminator,
};
use crate::properties::{Property, Registry};
use crate::rewrite;

/// Operations allowed in the post-process pipeline.
pub const PIPELINE_OPS: [&str; 5] = [
    "sort_product",
    "canonicalise",
    "collect_terms",
    "distribute",
    "rename_dummies",
];

/// Default pipeline run after every expression-producing statement.
pub const DEFAULT_PIPELINE: [&str; 3] = ["sort_product", "canonicalise", "collect_terms"];

#[derive(Clone, Debug)]
pub struct Session {
    bindings: BTreeMap<String, Expr>,
    last: Expr,
    /// Label whose value `_` currently shows, rebound together with `_`.
    last_label: Option<String>,
    post_process: Vec<String>,
    registry: Registry,
    style: Style,
}

impl Default for Session {
    fn default() -> Self {
        Session {
            bindings: BTreeMap::new(),
            last: Expr::zero(),
            last_label: None,
            post_process: DEFAULT_PIPELINE.iter().map(|s| s.to_string()).collect(),
            registry: Registry::new(),
            style: Style::Plain,
        }
    }
}

/// Which binding an operation's result goes back to.
enum Target {
    Label(String),
    Last,
    Inline,
}

impl Session {
    pub fn new(style: Style) -> Self {
        Session {
            style,
            ..Session::default()
        }
    }

    pub fn bindings(&self) -> &BTreeMap<String, Expr> {
        &self.bindings
    }

    pub fn binding(&self, label: &str) -> Option<&Expr> {
        self.bindings.get(label)
    }

    pub fn last(&self) -> &Expr {
        &self.last
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn post_process(&self) -> &[String] {
        &self.post_process
    }

    pub fn set_post_process(&mut self, ops: Vec<String>) -> Result<()> {
        if let Some(bad) = ops.iter().find(|o| !PIPELINE_OPS.contains(&o.as_str())) {
            return Err(Error::UnknownOperation(bad.clone()));
        }
        self.post_process = ops;
        Ok(())
    }

    fn apply_op(&self, op: &str, e: &Expr) -> Result<Expr> {
        let reg = &self.registry;
        match op {
            "sort_product" => Ok(rewrite::sort_product(e)),
            "canonicalise" => rewrite::canonicalise(e, reg),
            "collect_terms" => Ok(rewrite::collect_terms(e)),
            "distribute" => Ok(rewrite::distribute(e)),
            "rename_dummies" => rename_dummies(e, reg),
            other => Err(Error::UnknownOperation(other.to_string())),
        }
    }

    fn run_pipeline(&self, e: Expr) -> Result<Expr> {
        self.post_process
            .iter()
            .try_fold(e, |acc, op| self.apply_op(op, &acc))
    }

    /// Runs every statement of a script, collecting the displayed lines.
    /// Stops at the first error.
    pub fn run_script(&mut self, text: &str) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for (line, src) in split_statements(text) {
            let st = parse_statement_at(&src, line).map_err(|e| at(line, e))?;
            if let Some(s) = self.run_statement(&st)? {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Executes one statement; returns the displayed text when the
    /// statement ends in `;`.
    pub fn run_statement(&mut self, st: &Statement) -> Result<Option<String>> {
        let shown = self.execute(&st.kind).map_err(|e| at(st.line, e))?;
        Ok(match st.terminator {
            Terminator::Display => shown,
            Terminator::Suppress => None,
        })
    }

    fn show(&self, e: &Expr) -> String {
        print(e, self.style)
    }

    fn resolve(&self, arg: &Arg) -> Result<(Expr, Target)> {
        match arg {
            Arg::Last => Ok((self.last.clone(), Target::Last)),
            Arg::Label(l) => self
                .bindings
                .get(l)
                .map(|e| (e.clone(), Target::Label(l.clone())))
                .ok_or_else(|| Error::UnknownLabel(l.clone())),
            Arg::Expr(e) => Ok((e.clone(), Target::Inline)),
            Arg::Str(_) | Arg::Keyword(..) => Err(Error::args(
                "statement",
                "expected an expression, a label or `_`",
            )),
        }
    }

    fn value(&self, arg: &Arg) -> Result<Expr> {
        Ok(self.resolve(arg)?.0)
    }

    fn bind(&mut self, target: Target, value: Expr) {
        match target {
            Target::Label(l) => {
                self.bindings.insert(l.clone(), value.clone());
                self.last_label = Some(l);
            }
            Target::Last => {
                if let Some(l) = &self.last_label {
                    self.bindings.insert(l.clone(), value.clone());
                }
            }
            Target::Inline => self.last_label = None,
        }
        self.last = value;
    }

    fn execute(&mut self, kind: &StatementKind) -> Result<Option<String>> {
        match kind {
            StatementKind::Attach {
                objects,
                property,
                args,
            } => {
                let prop = Property::from_declaration(property, args)?;
                let label = prop.label();
                self.registry.attach(objects, prop)?;
                let objs = match objects {
                    Expr::List(xs) => format!(
                        "[{}]",
                        xs.iter()
                            .map(|x| self.show(x))
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                    other => self.show(other),
                };
                Ok(Some(format!("Attached property {label} to {objs}.")))
            }
            StatementKind::Assign { label, expr } => {
                let v = self.run_pipeline(expr.clone())?;
                self.bind(Target::Label(label.clone()), v.clone());
                Ok(Some(self.show(&v)))
            }
            StatementKind::Show(arg) => {
                let (e, target) = self.resolve(arg)?;
                let v = match target {
                    Target::Inline => self.run_pipeline(e)?,
                    _ => e,
                };
                self.bind(target, v.clone());
                Ok(Some(self.show(&v)))
            }
            StatementKind::Call { op, args } => self.call(op, args),
        }
    }

    fn call(&mut self, op: &str, args: &[Arg]) -> Result<Option<String>> {
        let reg = self.registry.clone();
        let need = |n: usize| -> Result<()> {
            if args.len() < n {
                Err(Error::args(
                    op,
                    format!("expected at least {n} argument(s)"),
                ))
            } else {
                Ok(())
            }
        };
        match op {
            "set_post_process" => {
                let ops = args
                    .iter()
                    .map(|a| match a {
                        Arg::Str(s) | Arg::Label(s) => Ok(s.clone()),
                        _ => Err(Error::args(op, "expected operation names")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.set_post_process(ops)?;
                return Ok(None);
            }
            "to_scalar" => {
                need(1)?;
                let v = kernel::simplify_full(&self.value(&args[0])?)?;
                return Ok(Some(self.show(&v)));
            }
            "scalar_call" => {
                need(2)?;
                let Arg::Str(name) = &args[0] else {
                    return Err(Error::args(
                        op,
                        "first argument must be a function name string",
                    ));
                };
                let v = kernel::scalar_call(name, &self.value(&args[1])?)?;
                return Ok(Some(self.show(&v)));
            }
            _ => {}
        }
        need(1)?;
        let (target, dest) = self.resolve(&args[0])?;
        let result = match op {
            "sort_product" | "canonicalise" | "collect_terms" | "distribute" | "rename_dummies" => {
                self.apply_op(op, &target)?
            }
            "substitute" => {
                need(2)?;
                let mut acc = target;
                for a in &args[1..] {
                    acc = rewrite::substitute(&acc, &self.value(a)?, &reg)?;
                }
                acc
            }
            "vary" => {
                need(2)?;
                rewrite::vary(&target, &self.value(&args[1])?, &reg)?
            }
            "integrate_by_parts" => {
                need(2)?;
                rewrite::integrate_by_parts(&target, &self.value(&args[1])?, &reg)?
            }
            "complete" => {
                need(2)?;
                let rules = ComponentRules::from_expr(&target, &reg)?;
                components::complete(&rules, &self.value(&args[1])?, &reg)?.to_expr()
            }
            "evaluate" => {
                need(2)?;
                let rules = ComponentRules::from_expr(&self.value(&args[1])?, &reg)?;
                let mut rhs_only = false;
                for a in &args[2..] {
                    match a {
                        Arg::Keyword(k, v) if k == "rhsonly" => {
                            rhs_only = match v.as_symbol() {
                                Some("True" | "true") => true,
                                Some("False" | "false") => false,
                                _ => return Err(Error::args(op, "rhsonly must be True or False")),
                            }
                        }
                        _ => return Err(Error::args(op, "unexpected argument")),
                    }
                }
                components::evaluate(&target, &rules, rhs_only, &reg)?
            }
            "map_scalar" => {
                let name = match args.get(1) {
                    None => None,
                    Some(Arg::Str(s)) => Some(s.clone()),
                    Some(_) => return Err(Error::args(op, "function name must be a string")),
                };
                map_scalar(&target, name.as_deref())?
            }
            other => return Err(Error::UnknownOperation(other.to_string())),
        };
        let v = self.run_pipeline(result)?;
        self.bind(dest, v.clone());
        Ok(Some(self.show(&v)))
    }
}

/// Applies a kernel function to every maximal scalar part of `e`.
/// Without a name, parts are simplified and their integrals evaluated.
pub fn map_scalar(e: &Expr, name: Option<&str>) -> Result<Expr> {
    if let Some(n) = name {
        if !["integrate", "simplify", "expand_trig", "trig_normalize"].contains(&n) {
            return Err(Error::UnknownFunction(n.to_string()));
        }
    }
    kernel::map_scalar_parts(e, &mut |part| {
        let r = match name {
            None => kernel::simplify_full(part),
            Some(n) => kernel::scalar_call(n, part),
        };
        match r {
            Err(Error::UnsupportedIntegral(_)) => Ok(part.clone()),
            other => other,
        }
    })
}

fn at(line: usize, e: Error) -> Error {
    match e {
        Error::AtStatement { .. } => e,
        other => Error::AtStatement {
            line,
            source: Box::new(other),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_last() {
        let mut s = Session::default();
        let out = s
            .run_script("ex := 1/x; map_scalar(_, \"integrate\"); ex;")
            .unwrap();
        assert_eq!(out, vec!["x**(-1)", "log(x)", "log(x)"]);
    }

    #[test]
    fn suppressed_output_and_echo() {
        let mut s = Session::default();
        let out = s
            .run_script("{\\theta,\\varphi}::Coordinate;\nF_{a b}::AntiSymmetric.\na := 2.")
            .unwrap();
        assert_eq!(
            out,
            vec!["Attached property Coordinate to [theta, varphi]."]
        );
    }

    #[test]
    fn errors_carry_lines() {
        let mut s = Session::default();
        let err = s.run_script("a := 1;\n\nfoo(a);").unwrap_err();
        assert!(matches!(err, Error::AtStatement { line: 3, .. }), "{err:?}");
        let err = s.run_script("nope;").unwrap_err();
        assert!(
            matches!(err, Error::AtStatement { source, .. } if matches!(*source, Error::UnknownLabel(_)))
        );
    }

    #[test]
    fn pipeline_control() {
        let mut s = Session::default();
        s.run_script("{\\mu,\\nu}::Indices(position=free). F_{\\mu\\nu}::AntiSymmetric.")
            .unwrap();
        assert_eq!(
            s.run_script("F_{\\mu\\nu} + F_{\\nu\\mu};").unwrap(),
            vec!["0"]
        );
        s.run_script("set_post_process(\"collect_terms\").")
            .unwrap();
        assert_eq!(
            s.run_script("F_{\\mu\\nu} + F_{\\nu\\mu};").unwrap(),
            vec!["F_{mu nu} + F_{nu mu}"]
        );
        assert!(s.run_script("set_post_process(\"bogus\").").is_err());
    }
}
