//! Plain-text LTL syntax.
//!
//! ```text
//! formula  := or ( "->" formula )?
//! or       := and ( "|" and )*
//! and      := temporal ( "&" temporal )*
//! temporal := unary ( ("U" | "R" | "W") temporal )?
//! unary    := ("!" | "X" | "F" | "G") unary | primary
//! primary  := "true" | "false" | "(" formula ")" | IDENT ( ("<" | "=") NUMBER )?
//! ```
//!
//! `TRUE` and `FALSE` are accepted as aliases so that SMV output can be read
//! back. The printer emits the minimal parenthesization that re-parses to the
//! same tree, except that operands of unary operators other than plain
//! propositions are always parenthesized (`F q`, `G(p -> F q)`).

use std::fmt;

use thiserror::Error;

use super::formula::{is_identifier, Atom, Formula, Node, Rel};
use crate::constant::Constant;

/// Words that cannot be used as proposition or variable names.
pub const RESERVED_WORDS: &[&str] = &["X", "F", "G", "U", "R", "W", "true", "false", "TRUE", "FALSE"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    /// 1-based character column.
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Lt,
    Eq,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "`{s}`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '!' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '<' => Some(Tok::Lt),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, column));
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Arrow, column));
            i += 2;
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push((Tok::Number(chars[start..i].iter().collect()), column));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), column));
        } else {
            return Err(SyntaxError {
                column,
                expected: vec!["a formula token".into()],
                found: format!("`{c}`"),
            });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek() {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].0.clone();
        if tok != Tok::End {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let (tok, column) = &self.toks[self.pos];
        SyntaxError {
            column: *column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.to_string(),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            return Ok(lhs.implies(self.formula()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.temporal()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = lhs.and(self.temporal()?);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.unary()?;
        let build: fn(Formula, Formula) -> Formula = match self.peek_word() {
            Some("U") => Formula::until,
            Some("R") => Formula::release,
            Some("W") => Formula::weak_until,
            _ => return Ok(lhs),
        };
        self.bump();
        Ok(build(lhs, self.temporal()?))
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(self.unary()?.not());
        }
        let build: fn(Formula) -> Formula = match self.peek_word() {
            Some("X") => Formula::next,
            Some("F") => Formula::eventually,
            Some("G") => Formula::globally,
            _ => return self.primary(),
        };
        self.bump();
        Ok(build(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        const EXPECTED: &[&str] = &["`!`", "`X`", "`F`", "`G`", "`(`", "`true`", "`false`", "an identifier"];
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(word) => match word.as_str() {
                "true" | "TRUE" => {
                    self.bump();
                    Ok(Formula::tt())
                }
                "false" | "FALSE" => {
                    self.bump();
                    Ok(Formula::ff())
                }
                w if RESERVED_WORDS.contains(&w) => Err(self.error(EXPECTED)),
                _ => {
                    self.bump();
                    let rel = match self.peek() {
                        Tok::Lt => Rel::Lt,
                        Tok::Eq => Rel::Eq,
                        _ => return Ok(Formula::prop(word)),
                    };
                    self.bump();
                    let Tok::Number(text) = self.peek().clone() else {
                        return Err(self.error(&["a number"]));
                    };
                    let constant: Constant = text.parse().map_err(|_| self.error(&["a decimal number"]))?;
                    self.bump();
                    Ok(Formula::constraint(word, rel, constant))
                }
            },
            _ => Err(self.error(EXPECTED)),
        }
    }
}

/// Parses one formula in the plain-text syntax.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let formula = parser.formula()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(&["an operator", "end of input"]));
    }
    Ok(formula)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Neutral,
    /// NuSMV LTL: `TRUE`/`FALSE`, release spelled `V`, weak-until expanded.
    Smv,
}

/// Renders `formula` in the given dialect.
pub fn render(formula: &Formula, dialect: Dialect) -> String {
    let mut out = String::new();
    write_prec(&mut out, formula, 0, dialect);
    out
}

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const BINARY_TEMPORAL: u8 = 4;
const UNARY: u8 = 5;
const PRIMARY: u8 = 6;

fn precedence(formula: &Formula, dialect: Dialect) -> u8 {
    match formula.node() {
        Node::True | Node::False | Node::Atom(_) => PRIMARY,
        Node::Not(_) | Node::Next(_) | Node::Eventually(_) | Node::Globally(_) => UNARY,
        Node::WeakUntil(..) if dialect == Dialect::Smv => OR,
        Node::Until(..) | Node::Release(..) | Node::WeakUntil(..) => BINARY_TEMPORAL,
        Node::And(..) => AND,
        Node::Or(..) => OR,
        Node::Implies(..) => IMPLIES,
    }
}

fn write_prec(out: &mut String, formula: &Formula, min: u8, dialect: Dialect) {
    let wrap = precedence(formula, dialect) < min;
    if wrap {
        out.push('(');
    }
    write_node(out, formula, dialect);
    if wrap {
        out.push(')');
    }
}

fn write_node(out: &mut String, formula: &Formula, dialect: Dialect) {
    let smv = dialect == Dialect::Smv;
    let binary = |out: &mut String, a: &Formula, op: &str, b: &Formula, left: u8, right: u8| {
        write_prec(out, a, left, dialect);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_prec(out, b, right, dialect);
    };
    match formula.node() {
        Node::True => out.push_str(if smv { "TRUE" } else { "true" }),
        Node::False => out.push_str(if smv { "FALSE" } else { "false" }),
        Node::Atom(atom) => out.push_str(&atom.to_string()),
        Node::Not(a) => write_unary(out, "!", a, dialect),
        Node::Next(a) => write_unary(out, "X", a, dialect),
        Node::Eventually(a) => write_unary(out, "F", a, dialect),
        Node::Globally(a) => write_unary(out, "G", a, dialect),
        Node::And(a, b) => binary(out, a, "&", b, AND, AND + 1),
        Node::Or(a, b) => binary(out, a, "|", b, OR, OR + 1),
        Node::Implies(a, b) => binary(out, a, "->", b, IMPLIES + 1, IMPLIES),
        Node::Until(a, b) => binary(out, a, "U", b, UNARY, BINARY_TEMPORAL),
        Node::Release(a, b) => binary(out, a, if smv { "V" } else { "R" }, b, UNARY, BINARY_TEMPORAL),
        Node::WeakUntil(a, b) if smv => {
            // a W b == (a U b) | G a
            let expanded = a.clone().until(b.clone()).or(a.clone().globally());
            write_node(out, &expanded, dialect);
        }
        Node::WeakUntil(a, b) => binary(out, a, "W", b, UNARY, BINARY_TEMPORAL),
    }
}

fn write_unary(out: &mut String, op: &str, operand: &Formula, dialect: Dialect) {
    out.push_str(op);
    if matches!(operand.node(), Node::Atom(Atom::Prop(_))) {
        if op != "!" {
            out.push(' ');
        }
        write_node(out, operand, dialect);
    } else {
        out.push('(');
        write_prec(out, operand, 0, dialect);
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, Dialect::Neutral))
    }
}

/// Whether `name` can appear as a proposition in the plain-text syntax.
pub fn is_usable_name(name: &str) -> bool {
    is_identifier(name) && !RESERVED_WORDS.contains(&name)
}
