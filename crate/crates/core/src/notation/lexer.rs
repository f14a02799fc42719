use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Command(String),
    Int(BigInt),
    Str(String),
    Sym(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

impl Token {
    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.tok, Tok::Sym(t) if t == s)
    }
}

const SYMBOLS: &[&str] = &[
    "**", "->", ":=", "::", "_", "^", "{", "}", "(", ")", ",", "+", "-", "*", "/", "=", ";", ".",
    "#", "$",
];

/// Commands that only affect spacing or delimiter sizing.
const IGNORED: &[&str] = &["left", "right", ",", ";", "!", " "];

/// Splits `text` into tokens; `line` is the line number of its first
/// character (1-based), used in error positions.
pub fn lex(text: &str, line: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut ln = line;
    let mut col = 1;
    while i < chars.len() {
        let c = chars[i];
        let start_col = col;
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            ln += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        let push = |tok: Tok, out: &mut Vec<Token>| {
            out.push(Token {
                tok,
                line: ln,
                col: start_col,
            })
        };
        if c.is_ascii_alphabetic() {
            let mut j = i;
            while j < chars.len()
                && (chars[j].is_ascii_alphanumeric()
                    || (chars[j] == '_'
                        && chars.get(j + 1).is_some_and(|n| n.is_ascii_alphanumeric())))
            {
                j += 1;
            }
            push(Tok::Ident(chars[i..j].iter().collect()), &mut out);
            advance(j - i, &mut i, &mut col);
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            push(Tok::Int(s.parse().expect("digits")), &mut out);
            advance(j - i, &mut i, &mut col);
        } else if c == '\\' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_alphabetic() {
                j += 1;
            }
            if j == i + 1 {
                // single-character control symbol such as `\,`
                let sym = chars.get(i + 1).copied();
                match sym {
                    Some(s) if IGNORED.contains(&s.to_string().as_str()) => {
                        advance(2, &mut i, &mut col);
                        continue;
                    }
                    _ => return Err(Error::parse(ln, start_col, "stray backslash")),
                }
            }
            let name: String = chars[i + 1..j].iter().collect();
            if !IGNORED.contains(&name.as_str()) {
                push(Tok::Command(name), &mut out);
            }
            advance(j - i, &mut i, &mut col);
        } else if c == '"' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                j += 1;
            }
            if j >= chars.len() || chars[j] != '"' {
                return Err(Error::parse(ln, start_col, "unterminated string"));
            }
            push(Tok::Str(chars[i + 1..j].iter().collect()), &mut out);
            advance(j + 1 - i, &mut i, &mut col);
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| {
                    Error::parse(ln, start_col, format!("unexpected character '{c}'"))
                })?;
            push(Tok::Sym(sym), &mut out);
            advance(sym.len(), &mut i, &mut col);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_tex_fragments() {
        let t = lex(r"F_{\mu\nu} -> x**2 \left( y \right)", 1).unwrap();
        let kinds: Vec<_> = t.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(kinds[0], Tok::Ident("F".into()));
        assert_eq!(kinds[3], Tok::Command("mu".into()));
        assert!(kinds.contains(&Tok::Sym("->")));
        assert!(kinds.contains(&Tok::Sym("**")));
        assert!(!kinds
            .iter()
            .any(|k| matches!(k, Tok::Command(c) if c == "left")));
    }

    #[test]
    fn positions_and_errors() {
        let t = lex("a\n  b", 3).unwrap();
        assert_eq!((t[1].line, t[1].col), (4, 3));
        assert!(lex("a ? b", 1).is_err());
        assert!(lex("\"open", 1).is_err());
        let t = lex("map_scalar(x) A_{b}", 1).unwrap();
        assert_eq!(t[0].tok, Tok::Ident("map_scalar".into()));
        assert_eq!(t[4].tok, Tok::Ident("A".into()));
    }
}
