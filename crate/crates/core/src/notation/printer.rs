use num_traits::{One, Signed};

use super::is_greek;
use crate::expr::{Components, Expr, Index, Variance};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Style {
    Latex,
    #[default]
    Plain,
}

pub fn print(e: &Expr, style: Style) -> String {
    Printer { style }.expr(e)
}

pub fn print_latex(e: &Expr) -> String {
    print(e, Style::Latex)
}

pub fn print_plain(e: &Expr) -> String {
    print(e, Style::Plain)
}

struct Printer {
    style: Style,
}

impl Printer {
    fn latex(&self) -> bool {
        self.style == Style::Latex
    }

    fn name(&self, n: &str) -> String {
        if self.latex() && (is_greek(n) || n == "Box") {
            format!("\\{n}")
        } else {
            n.to_string()
        }
    }

    fn expr(&self, e: &Expr) -> String {
        match e {
            Expr::Equation(l, r) => {
                if let (Expr::Atom { name, indices }, Expr::Components(c)) =
                    (l.as_ref(), r.as_ref())
                {
                    if *name == c.head && *indices == c.indices && !c.entries.is_empty() {
                        return format!("{} = {}", self.expr(l), self.entries(c));
                    }
                }
                format!("{} = {}", self.expr(l), self.expr(r))
            }
            Expr::Rule(l, r) => format!("{} -> {}", self.expr(l), self.expr(r)),
            Expr::Sum(ts) => self.sum(ts),
            other => self.sum(std::slice::from_ref(other)),
        }
    }

    fn sum(&self, terms: &[Expr]) -> String {
        let mut out = String::new();
        for (i, t) in terms.iter().enumerate() {
            let (c, rest) = t.split_coefficient();
            let body = self.term(&c.abs(), &rest);
            match (i, c.is_negative()) {
                (0, true) => out.push_str(&format!("-{body}")),
                (0, false) => out.push_str(&body),
                (_, true) => out.push_str(&format!(" - {body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    fn number(&self, q: &Rational) -> String {
        if q.is_integer() {
            q.to_integer().to_string()
        } else if self.latex() {
            format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    }

    fn term(&self, c: &Rational, rest: &Expr) -> String {
        if rest.is_one() {
            return self.number(c);
        }
        let mut parts = Vec::new();
        if !c.is_one() {
            parts.push(self.number(c));
        }
        for f in rest.factors() {
            parts.push(self.factor(&f));
        }
        parts.join(" ")
    }

    fn factor(&self, f: &Expr) -> String {
        match f {
            Expr::Sum(_) | Expr::Equation(..) | Expr::Rule(..) => format!("({})", self.expr(f)),
            Expr::Num(q) if q.is_negative() => format!("({})", self.expr(f)),
            Expr::Prod(_) => format!("({})", self.expr(f)),
            other => self.primary(other),
        }
    }

    fn indices(&self, ix: &[Index]) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < ix.len() {
            let v = ix[i].variance;
            out.push(if v == Variance::Lower { '_' } else { '^' });
            out.push('{');
            let mut first = true;
            let mut prev_command = false;
            while i < ix.len() && ix[i].variance == v {
                let n = self.name(&ix[i].name);
                let is_command = n.starts_with('\\');
                if !first && (!self.latex() || (prev_command && !is_command)) {
                    out.push(' ');
                }
                out.push_str(&n);
                prev_command = is_command;
                first = false;
                i += 1;
            }
            out.push('}');
        }
        out
    }

    fn primary(&self, e: &Expr) -> String {
        match e {
            Expr::Num(_) | Expr::Sum(_) | Expr::Prod(_) | Expr::Equation(..) | Expr::Rule(..) => {
                self.factor(e)
            }
            Expr::Atom { name, indices } => format!("{}{}", self.name(name), self.indices(indices)),
            Expr::Components(c) => {
                let cmd = if self.latex() {
                    "\\components"
                } else {
                    "components"
                };
                let head = Expr::tensor(c.head.clone(), c.indices.clone());
                format!("{cmd}{{{}}}{}", self.primary(&head), self.entries(c))
            }
            Expr::Accent { name, arg } => {
                let n = if self.latex() {
                    format!("\\{name}")
                } else {
                    name.clone()
                };
                format!("{n}{{{}}}", self.expr(arg))
            }
            Expr::Func { name, arg } => {
                let n = if self.latex() {
                    format!("\\{name}")
                } else {
                    name.clone()
                };
                format!("{n}({})", self.expr(arg))
            }
            Expr::Pow { base, exp } => self.power(base, exp),
            Expr::Deriv { indices, arg } => {
                let n = if self.latex() { "\\partial" } else { "partial" };
                format!("{n}{}{{{}}}", self.indices(indices), self.expr(arg))
            }
            Expr::Integral { body, var } => {
                if self.latex() {
                    let b = match body.as_ref() {
                        Expr::Sum(_) => format!("({})", self.expr(body)),
                        other => self.expr(other),
                    };
                    let v = self.name(var);
                    format!("\\int {b} d{v}")
                } else {
                    format!("int{{{}}}{{{}}}", self.expr(body), var)
                }
            }
            Expr::List(xs) => match xs.len() {
                0 => "{}".to_string(),
                1 => format!("{{{},}}", self.expr(&xs[0])),
                _ => format!(
                    "{{{}}}",
                    xs.iter()
                        .map(|x| self.expr(x))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            },
            Expr::Wildcard => "#".to_string(),
        }
    }

    fn power(&self, base: &Expr, exp: &Expr) -> String {
        let b = match base {
            Expr::Atom { indices, .. } if indices.is_empty() => self.primary(base),
            Expr::Num(q) if q.is_integer() && !q.is_negative() => self.number(q),
            Expr::Func { .. } if !self.latex() => self.primary(base),
            other => format!("({})", self.expr(other)),
        };
        match exp {
            Expr::Num(q) if self.latex() => format!("{b}^{{{}}}", fraction_text(q)),
            Expr::Num(q) if q.is_integer() && !q.is_negative() => format!("{b}**{}", q),
            Expr::Num(q) => format!("{b}**({})", fraction_text(q)),
            other => format!("{b}**({})", self.expr(other)),
        }
    }

    /// `{T_{x} = v, ...}`
    fn entries(&self, c: &Components) -> String {
        let items: Vec<String> = c
            .entries
            .iter()
            .map(|en| {
                format!(
                    "{} = {}",
                    self.primary(&c.entry_atom(&en.values)),
                    self.expr(&en.value)
                )
            })
            .collect();
        format!("{{{}}}", items.join(", "))
    }
}

fn fraction_text(q: &Rational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
