//! TeX-like expression language, printers, and the statement language.

mod lexer;
mod parser;
mod printer;
mod statement;

pub use parser::parse_expression;
pub use printer::{print, print_latex, print_plain, Style};
pub use statement::{
    parse_statement, parse_statement_at, split_statements, Arg, Statement, StatementKind,
    Terminator,
};

pub(crate) const GREEK: &[&str] = &[
    "alpha",
    "beta",
    "gamma",
    "delta",
    "epsilon",
    "varepsilon",
    "zeta",
    "eta",
    "theta",
    "vartheta",
    "iota",
    "kappa",
    "lambda",
    "mu",
    "nu",
    "xi",
    "pi",
    "rho",
    "sigma",
    "tau",
    "upsilon",
    "phi",
    "varphi",
    "chi",
    "psi",
    "omega",
    "Gamma",
    "Delta",
    "Theta",
    "Lambda",
    "Xi",
    "Pi",
    "Sigma",
    "Upsilon",
    "Phi",
    "Psi",
    "Omega",
];

/// Scalar functions known to the notation and the kernel.
pub(crate) const FUNCTIONS: &[&str] = &["sin", "cos", "tan", "log"];

/// Modifier commands that wrap one operand.
pub(crate) const ACCENTS: &[&str] = &["delta", "hat", "bar", "tilde", "dot"];

pub(crate) fn is_greek(name: &str) -> bool {
    GREEK.contains(&name)
}
