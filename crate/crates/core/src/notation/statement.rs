use super::lexer::{lex, Tok, Token};
use super::parser::parse_tokens;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::properties::PropertyArg;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminator {
    /// `;`
    Display,
    /// `.`
    Suppress,
}

/// Argument of an operation call.
#[derive(Clone, Debug, PartialEq)]
pub enum Arg {
    /// `$...$` or any other inline expression.
    Expr(Expr),
    /// A bare name, resolved against the session bindings.
    Label(String),
    /// `_`
    Last,
    Str(String),
    Keyword(String, Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatementKind {
    Attach {
        objects: Expr,
        property: String,
        args: Vec<PropertyArg>,
    },
    Assign {
        label: String,
        expr: Expr,
    },
    Call {
        op: String,
        args: Vec<Arg>,
    },
    Show(Arg),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub terminator: Terminator,
    pub line: usize,
}

/// Parses one complete statement; `line` is the line its text starts on.
pub fn parse_statement_at(text: &str, line: usize) -> Result<Statement> {
    let toks = lex(text, line)?;
    let Some(last) = toks.last() else {
        return Err(Error::parse(line, 1, "empty statement"));
    };
    let terminator = if last.is_sym(";") {
        Terminator::Display
    } else if last.is_sym(".") {
        Terminator::Suppress
    } else {
        return Err(Error::MissingTerminator);
    };
    let body = &toks[..toks.len() - 1];
    if body.is_empty() {
        return Err(Error::parse(last.line, last.col, "empty statement"));
    }
    check_balance(body)?;
    let kind = parse_kind(body)?;
    Ok(Statement {
        kind,
        terminator,
        line: body[0].line,
    })
}

pub fn parse_statement(text: &str) -> Result<Statement> {
    parse_statement_at(text, 1)
}

fn check_balance(toks: &[Token]) -> Result<()> {
    let mut stack: Vec<&Token> = Vec::new();
    let mut dollar: Option<&Token> = None;
    for t in toks {
        if t.is_sym("$") {
            dollar = if dollar.is_some() { None } else { Some(t) };
        } else if t.is_sym("(") || t.is_sym("{") {
            stack.push(t);
        } else if t.is_sym(")") || t.is_sym("}") {
            let want = if t.is_sym(")") { "(" } else { "{" };
            match stack.pop() {
                Some(o) if o.is_sym(want) => {}
                _ => return Err(Error::parse(t.line, t.col, "unbalanced delimiter")),
            }
        }
    }
    if let Some(o) = stack.pop().or(dollar) {
        return Err(Error::parse(o.line, o.col, "unclosed delimiter"));
    }
    Ok(())
}

fn find_top_level(toks: &[Token], sym: &str) -> Option<usize> {
    let mut depth = 0i32;
    let mut in_dollar = false;
    for (i, t) in toks.iter().enumerate() {
        if t.is_sym("$") {
            in_dollar = !in_dollar;
        } else if t.is_sym("(") || t.is_sym("{") {
            depth += 1;
        } else if t.is_sym(")") || t.is_sym("}") {
            depth -= 1;
        } else if depth == 0 && !in_dollar && t.is_sym(sym) {
            return Some(i);
        }
    }
    None
}

fn parse_kind(toks: &[Token]) -> Result<StatementKind> {
    if let Some(i) = find_top_level(toks, "::") {
        if i == 0 {
            return Err(Error::parse(
                toks[0].line,
                toks[0].col,
                "missing objects before '::'",
            ));
        }
        let objects = parse_tokens(&toks[..i])?;
        let rest = &toks[i + 1..];
        let (property, args) = parse_property(rest, &toks[i])?;
        return Ok(StatementKind::Attach {
            objects,
            property,
            args,
        });
    }
    if let [Token {
        tok: Tok::Ident(label),
        ..
    }, t, rest @ ..] = toks
    {
        if t.is_sym(":=") {
            if rest.is_empty() {
                return Err(Error::parse(t.line, t.col, "missing expression after ':='"));
            }
            return Ok(StatementKind::Assign {
                label: label.clone(),
                expr: parse_tokens(rest)?,
            });
        }
    }
    if let [t] = toks {
        if t.is_sym("_") {
            return Ok(StatementKind::Show(Arg::Last));
        }
        if let Tok::Ident(name) = &t.tok {
            return Ok(StatementKind::Show(Arg::Label(name.clone())));
        }
    }
    if let [Token {
        tok: Tok::Ident(op),
        ..
    }, open, .., close] = toks
    {
        let is_call = open.is_sym("(")
            && close.is_sym(")")
            && !super::FUNCTIONS.contains(&op.as_str())
            && matching_close(toks, 1) == Some(toks.len() - 1);
        if is_call {
            let args = split_args(&toks[2..toks.len() - 1])?
                .into_iter()
                .map(parse_arg)
                .collect::<Result<Vec<_>>>()?;
            return Ok(StatementKind::Call {
                op: op.clone(),
                args,
            });
        }
    }
    Ok(StatementKind::Show(Arg::Expr(parse_tokens(
        &strip_dollars(toks)?,
    )?)))
}

fn matching_close(toks: &[Token], open: usize) -> Option<usize> {
    let mut depth = 0;
    for (i, t) in toks.iter().enumerate().skip(open) {
        if t.is_sym("(") || t.is_sym("{") {
            depth += 1;
        } else if t.is_sym(")") || t.is_sym("}") {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

fn strip_dollars(toks: &[Token]) -> Result<Vec<Token>> {
    match toks {
        [a, inner @ .., b] if a.is_sym("$") && b.is_sym("$") => Ok(inner.to_vec()),
        _ => Ok(toks.to_vec()),
    }
}

fn split_args(toks: &[Token]) -> Result<Vec<&[Token]>> {
    if toks.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut start = 0;
    let mut depth = 0i32;
    let mut in_dollar = false;
    for (i, t) in toks.iter().enumerate() {
        if t.is_sym("$") {
            in_dollar = !in_dollar;
        } else if t.is_sym("(") || t.is_sym("{") {
            depth += 1;
        } else if t.is_sym(")") || t.is_sym("}") {
            depth -= 1;
        } else if t.is_sym(",") && depth == 0 && !in_dollar {
            if i == start {
                return Err(Error::parse(t.line, t.col, "empty argument"));
            }
            out.push(&toks[start..i]);
            start = i + 1;
        }
    }
    if start >= toks.len() {
        let t = toks.last().unwrap();
        return Err(Error::parse(t.line, t.col, "empty argument"));
    }
    out.push(&toks[start..]);
    Ok(out)
}

fn parse_arg(toks: &[Token]) -> Result<Arg> {
    match toks {
        [t] if t.is_sym("_") => Ok(Arg::Last),
        [Token {
            tok: Tok::Ident(n), ..
        }] => Ok(Arg::Label(n.clone())),
        [Token {
            tok: Tok::Str(s), ..
        }] => Ok(Arg::Str(s.clone())),
        [Token {
            tok: Tok::Ident(k), ..
        }, eq, rest @ ..]
            if eq.is_sym("=") && !rest.is_empty() =>
        {
            Ok(Arg::Keyword(
                k.clone(),
                parse_tokens(&strip_dollars(rest)?)?,
            ))
        }
        _ => Ok(Arg::Expr(parse_tokens(&strip_dollars(toks)?)?)),
    }
}

fn parse_property(toks: &[Token], at: &Token) -> Result<(String, Vec<PropertyArg>)> {
    let Some((first, rest)) = toks.split_first() else {
        return Err(Error::parse(
            at.line,
            at.col,
            "missing property name after '::'",
        ));
    };
    let Tok::Ident(name) = &first.tok else {
        return Err(Error::parse(
            first.line,
            first.col,
            "expected a property name",
        ));
    };
    if rest.is_empty() {
        return Ok((name.clone(), Vec::new()));
    }
    if !rest[0].is_sym("(")
        || !rest[rest.len() - 1].is_sym(")")
        || matching_close(rest, 0) != Some(rest.len() - 1)
    {
        return Err(Error::parse(
            rest[0].line,
            rest[0].col,
            "malformed option list",
        ));
    }
    let mut args = Vec::new();
    for a in split_args(&rest[1..rest.len() - 1])? {
        match a {
            [Token {
                tok: Tok::Ident(k), ..
            }, eq, v @ ..]
                if eq.is_sym("=") =>
            {
                if v.is_empty() {
                    return Err(Error::parse(eq.line, eq.col, "malformed option list"));
                }
                args.push(PropertyArg {
                    key: Some(k.clone()),
                    value: parse_tokens(v)?,
                });
            }
            other => args.push(PropertyArg {
                key: None,
                value: parse_tokens(other)?,
            }),
        }
    }
    Ok((name.clone(), args))
}

/// Splits script text into statements with their starting lines.
///
/// A statement ends at `;`, or at `.` followed by whitespace or end of
/// input, outside of brackets, strings and `$...$`. Lines starting with
/// `#` between statements are comments. Trailing text without a
/// terminator is returned as its own (invalid) statement.
pub fn split_statements(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start_line = 1;
    let mut depth = 0i32;
    let mut in_str = false;
    let mut in_dollar = false;
    for (ln0, line) in text.lines().enumerate() {
        let ln = ln0 + 1;
        if cur.trim().is_empty() && line.trim_start().starts_with('#') {
            continue;
        }
        let chars: Vec<char> = line.chars().collect();
        for (i, &c) in chars.iter().enumerate() {
            if cur.trim().is_empty() && !c.is_whitespace() {
                cur.clear();
                start_line = ln;
            }
            cur.push(c);
            if in_str {
                in_str = c != '"';
                continue;
            }
            match c {
                '"' => in_str = true,
                '$' => in_dollar = !in_dollar,
                '(' | '{' => depth += 1,
                ')' | '}' => depth -= 1,
                ';' if depth <= 0 && !in_dollar => {
                    out.push((start_line, std::mem::take(&mut cur)));
                    depth = 0;
                }
                '.' if depth <= 0
                    && !in_dollar
                    && chars.get(i + 1).map(|n| n.is_whitespace()).unwrap_or(true) =>
                {
                    out.push((start_line, std::mem::take(&mut cur)));
                    depth = 0;
                }
                _ => {}
            }
        }
        cur.push('\n');
    }
    if !cur.trim().is_empty() {
        out.push((start_line, cur));
    }
    out
}
