use std::ops::Neg;

use num_traits::Zero;

use super::lexer::{lex, Tok, Token};
use super::{is_greek, ACCENTS, FUNCTIONS};
use crate::error::{Error, Result};
use crate::expr::{ComponentEntry, Components, Expr, Index, Variance};
use crate::Rational;

/// Parses one expression (no statement terminator).
pub fn parse_expression(text: &str) -> Result<Expr> {
    let toks = lex(text, 1)?;
    parse_tokens(&toks)
}

pub(crate) fn parse_tokens(toks: &[Token]) -> Result<Expr> {
    let mut p = Parser::new(toks);
    let e = p.full()?;
    if let Some(t) = p.peek() {
        return Err(Error::parse(t.line, t.col, "unexpected trailing input"));
    }
    Ok(e)
}

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
}

fn is_known_name(name: &str) -> bool {
    is_greek(name) || name == "Box"
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [Token]) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + k)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        self.peek().map(|t| t.is_sym(s)).unwrap_or(false)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        match self.peek().or(self.toks.last()) {
            Some(t) if self.peek().is_some() => Error::parse(t.line, t.col, msg),
            Some(t) => Error::parse(t.line, t.col + 1, format!("{} at end of input", msg.into())),
            None => Error::parse(1, 1, format!("{} at end of input", msg.into())),
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.at_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{s}'")))
        }
    }

    /// Equation, rule, or plain sum.
    pub(crate) fn full(&mut self) -> Result<Expr> {
        let lhs = self.sum(false)?;
        if self.at_sym("=") {
            self.bump();
            let rhs = self.sum(false)?;
            if let Some(c) = as_components(&lhs, &rhs) {
                return Ok(Expr::equation(lhs, Expr::components(c)));
            }
            return Ok(Expr::equation(lhs, rhs));
        }
        if self.at_sym("->") {
            self.bump();
            let rhs = self.sum(false)?;
            return Ok(Expr::rule(lhs, rhs));
        }
        Ok(lhs)
    }

    fn sum(&mut self, stop_measure: bool) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut negate = false;
        if self.at_sym("-") {
            self.bump();
            negate = true;
        } else if self.at_sym("+") {
            self.bump();
        }
        loop {
            let t = self.term(stop_measure)?;
            terms.push(if negate { t.neg() } else { t });
            if self.at_sym("+") {
                negate = false;
            } else if self.at_sym("-") {
                negate = true;
            } else {
                break;
            }
            self.bump();
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self, stop_measure: bool) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.at_sym("*") {
                self.bump();
                factors.push(self.factor()?);
            } else if self.at_sym("/") {
                self.bump();
                let d = self.factor()?;
                factors.push(Expr::pow(d, Expr::num(-1)));
            } else if self.starts_primary(stop_measure) {
                factors.push(self.factor()?);
            } else {
                break;
            }
        }
        Ok(Expr::product(factors))
    }

    fn starts_primary(&self, stop_measure: bool) -> bool {
        let Some(t) = self.peek() else { return false };
        match &t.tok {
            Tok::Int(_) | Tok::Command(_) => true,
            Tok::Ident(_) => !(stop_measure && self.measure_at().is_some()),
            Tok::Sym(s) => matches!(*s, "(" | "{" | "#"),
            Tok::Str(_) => false,
        }
    }

    /// Integration measure at the cursor: `dx` or `d\theta`, as
    /// (variable, tokens used).
    fn measure_at(&self) -> Option<(String, usize)> {
        match &self.peek()?.tok {
            Tok::Ident(s) if s == "d" => match &self.peek_at(1)?.tok {
                Tok::Command(c) if is_greek(c) => Some((c.clone(), 2)),
                Tok::Ident(v) => Some((v.clone(), 2)),
                _ => None,
            },
            Tok::Ident(s) if s.len() >= 2 && s.starts_with('d') => Some((s[1..].to_string(), 1)),
            _ => None,
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let mut base = self.primary()?;
        loop {
            if self.at_sym("**") {
                self.bump();
                let e = if self.at_sym("-") {
                    self.bump();
                    self.primary()?.neg()
                } else {
                    self.primary()?
                };
                base = Expr::pow(base, e);
            } else if let Some((q, used)) = self.numeric_sup() {
                self.pos += used;
                base = Expr::pow(base, Expr::rational(q));
            } else {
                return Ok(base);
            }
        }
    }

    /// `^{n}`, `^{-n}`, `^{p/q}` or `^n` at the cursor.
    fn numeric_sup(&self) -> Option<(Rational, usize)> {
        if !self.at_sym("^") {
            return None;
        }
        let tok = |k: usize| self.peek_at(k).map(|t| &t.tok);
        if let Some(Tok::Int(n)) = tok(1) {
            return Some((Rational::from_integer(n.clone()), 2));
        }
        if !matches!(tok(1), Some(Tok::Sym("{"))) {
            return None;
        }
        let mut k = 2;
        let neg = matches!(tok(k), Some(Tok::Sym("-")));
        if neg {
            k += 1;
        }
        let Some(Tok::Int(n)) = tok(k) else {
            return None;
        };
        k += 1;
        let mut q = Rational::from_integer(n.clone());
        if matches!(tok(k), Some(Tok::Sym("/"))) {
            let Some(Tok::Int(d)) = tok(k + 1) else {
                return None;
            };
            if d.is_zero() {
                return None;
            }
            q /= Rational::from_integer(d.clone());
            k += 2;
        }
        if !matches!(tok(k), Some(Tok::Sym("}"))) {
            return None;
        }
        Some((if neg { -q } else { q }, k + 1))
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(t) = self.peek() else {
            return Err(self.err("expected an expression"));
        };
        match &t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::rational(Rational::from_integer(n.clone())))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.sum(false)?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("{") => self.braced_list_or_group(),
            Tok::Sym("#") => {
                self.bump();
                Ok(Expr::Wildcard)
            }
            Tok::Ident(name) => {
                let name = name.clone();
                let next_open = matches!(
                    self.peek_at(1).map(|t| &t.tok),
                    Some(Tok::Sym("{")) | Some(Tok::Sym("("))
                );
                let next_brace = matches!(self.peek_at(1).map(|t| &t.tok), Some(Tok::Sym("{")));
                let next_index = matches!(
                    self.peek_at(1).map(|t| &t.tok),
                    Some(Tok::Sym("_")) | Some(Tok::Sym("^"))
                );
                match name.as_str() {
                    f if FUNCTIONS.contains(&f) && next_open => {
                        self.bump();
                        self.function(f)
                    }
                    "int" if next_brace => {
                        self.bump();
                        self.integral()
                    }
                    "partial" if next_open || next_index => {
                        self.bump();
                        self.derivative()
                    }
                    a if ACCENTS.contains(&a) && next_brace => {
                        self.bump();
                        self.accent(a)
                    }
                    "components" if next_brace => {
                        self.bump();
                        self.components()
                    }
                    "frac" if next_brace => {
                        self.bump();
                        self.frac()
                    }
                    _ => {
                        self.bump();
                        self.atom(name)
                    }
                }
            }
            Tok::Command(name) => {
                let name = name.clone();
                self.bump();
                match name.as_str() {
                    "partial" => self.derivative(),
                    "int" => self.integral(),
                    "frac" => self.frac(),
                    "components" => self.components(),
                    f if FUNCTIONS.contains(&f) => self.function(f),
                    a if ACCENTS.contains(&a) => {
                        if self.at_sym("{") {
                            self.accent(a)
                        } else if a == "delta" && (self.at_sym("_") || self.at_sym("^")) {
                            self.atom(name)
                        } else if matches!(
                            self.peek().map(|t| &t.tok),
                            Some(Tok::Ident(_)) | Some(Tok::Command(_))
                        ) {
                            let arg = self.primary()?;
                            Ok(Expr::accent(a, arg))
                        } else if a == "delta" {
                            self.atom(name)
                        } else {
                            Err(self.err(format!("\\{a} needs an operand")))
                        }
                    }
                    n if is_known_name(n) => self.atom(name),
                    other => {
                        self.pos -= 1;
                        Err(self.err(format!("unknown command \\{other}")))
                    }
                }
            }
            _ => Err(self.err("expected an expression")),
        }
    }

    fn braced_list_or_group(&mut self) -> Result<Expr> {
        self.expect_sym("{")?;
        if self.at_sym("}") {
            self.bump();
            return Ok(Expr::List(Vec::new()));
        }
        let mut items = vec![self.full()?];
        let mut comma = false;
        while self.at_sym(",") {
            self.bump();
            comma = true;
            if self.at_sym("}") {
                break;
            }
            items.push(self.full()?);
        }
        self.expect_sym("}")?;
        if items.len() == 1 && !comma {
            Ok(items.pop().unwrap())
        } else {
            Ok(Expr::List(items))
        }
    }

    fn braced(&mut self) -> Result<Expr> {
        self.expect_sym("{")?;
        let e = self.sum(false)?;
        self.expect_sym("}")?;
        Ok(e)
    }

    fn function(&mut self, name: &str) -> Result<Expr> {
        let arg = if self.at_sym("(") {
            self.bump();
            let e = self.sum(false)?;
            self.expect_sym(")")?;
            e
        } else if self.at_sym("{") {
            self.braced()?
        } else if self.starts_primary(false) {
            self.primary()?
        } else {
            return Err(self.err(format!("{name} needs an argument")));
        };
        Ok(Expr::func(name, arg))
    }

    fn accent(&mut self, name: &str) -> Result<Expr> {
        let arg = self.braced()?;
        Ok(Expr::accent(name, arg))
    }

    fn frac(&mut self) -> Result<Expr> {
        let n = self.braced()?;
        let d = self.braced()?;
        Ok(Expr::product([n, Expr::pow(d, Expr::num(-1))]))
    }

    fn integral(&mut self) -> Result<Expr> {
        if self.at_sym("{") {
            let body = self.braced()?;
            self.expect_sym("{")?;
            let var = self.plain_name()?;
            self.expect_sym("}")?;
            return Ok(Expr::integral(body, var));
        }
        let body = self.term(true)?;
        match self.measure_at() {
            Some((var, used)) => {
                self.pos += used;
                Ok(Expr::integral(body, var))
            }
            None => Err(self.err("expected integration measure such as dx")),
        }
    }

    fn plain_name(&mut self) -> Result<String> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            Some(Tok::Command(c)) if is_known_name(c) => {
                let c = c.clone();
                self.bump();
                Ok(c)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    fn derivative(&mut self) -> Result<Expr> {
        let indices = self.index_groups()?;
        let arg = if self.at_sym("{") {
            self.braced()?
        } else if self.at_sym("(") {
            self.bump();
            let e = self.sum(false)?;
            self.expect_sym(")")?;
            e
        } else if self.starts_primary(false) {
            self.primary()?
        } else {
            return Err(self.err("derivative needs an operand"));
        };
        Ok(Expr::deriv(indices, arg))
    }

    fn atom(&mut self, name: String) -> Result<Expr> {
        let indices = self.index_groups()?;
        Ok(Expr::tensor(name, indices))
    }

    fn index_groups(&mut self) -> Result<Vec<Index>> {
        let mut out = Vec::new();
        loop {
            let variance = if self.at_sym("_") {
                Variance::Lower
            } else if self.at_sym("^") {
                if self.numeric_sup().is_some() {
                    break;
                }
                Variance::Upper
            } else {
                break;
            };
            self.bump();
            if self.at_sym("{") {
                self.bump();
                let before = out.len();
                while !self.at_sym("}") {
                    self.index_names(variance, &mut out)?;
                }
                self.bump();
                if out.len() == before {
                    return Err(self.err("empty index group"));
                }
            } else {
                self.index_names(variance, &mut out)?;
            }
        }
        Ok(out)
    }

    fn index_names(&mut self, v: Variance, out: &mut Vec<Index>) -> Result<()> {
        let Some(t) = self.peek() else {
            return Err(self.err("index marker without operand"));
        };
        match &t.tok {
            Tok::Command(c) if is_known_name(c) => out.push(Index::new(c.clone(), v)),
            Tok::Command(c) => return Err(self.err(format!("unknown command \\{c}"))),
            Tok::Ident(s) if is_greek(s) => out.push(Index::new(s.clone(), v)),
            Tok::Ident(s) => out.extend(s.chars().map(|c| Index::new(c.to_string(), v))),
            Tok::Int(n) => out.extend(n.to_string().chars().map(|c| Index::new(c.to_string(), v))),
            _ => return Err(self.err("index marker without operand")),
        }
        self.bump();
        Ok(())
    }

    fn components(&mut self) -> Result<Expr> {
        self.expect_sym("{")?;
        let head = self.primary()?;
        self.expect_sym("}")?;
        let Expr::Atom { name, indices } = head else {
            return Err(self.err("component table needs an indexed object"));
        };
        self.expect_sym("{")?;
        let mut items = Vec::new();
        while !self.at_sym("}") {
            items.push(self.full()?);
            if !self.at_sym(",") {
                break;
            }
            self.bump();
        }
        self.expect_sym("}")?;
        let lhs = Expr::tensor(name.clone(), indices.clone());
        if items.is_empty() {
            return Ok(Expr::components(Components {
                head: name,
                indices,
                entries: Vec::new(),
            }));
        }
        as_components(&lhs, &Expr::List(items))
            .map(Expr::components)
            .ok_or_else(|| self.err("malformed component entries"))
    }
}

/// Recognizes `T_{ab} = {T_{xy} = v, ...}` component listings.
fn as_components(lhs: &Expr, rhs: &Expr) -> Option<Components> {
    let Expr::Atom { name, indices } = lhs else {
        return None;
    };
    if indices.is_empty() {
        return None;
    }
    let items: Vec<&Expr> = match rhs {
        Expr::List(xs) if !xs.is_empty() => xs.iter().collect(),
        e @ Expr::Equation(..) => vec![e],
        _ => return None,
    };
    let mut entries = Vec::new();
    for it in items {
        let Expr::Equation(l, v) = it else {
            return None;
        };
        let Expr::Atom {
            name: n2,
            indices: i2,
        } = l.as_ref()
        else {
            return None;
        };
        if n2 != name
            || i2.len() != indices.len()
            || i2
                .iter()
                .zip(indices)
                .any(|(a, b)| a.variance != b.variance)
        {
            return None;
        }
        entries.push(ComponentEntry {
            values: i2.iter().map(|i| i.name.clone()).collect(),
            value: v.as_ref().clone(),
        });
    }
    Some(Components {
        head: name.clone(),
        indices: indices.clone(),
        entries,
    })
}
