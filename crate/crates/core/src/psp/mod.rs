//! Property specification patterns: requirement sentences, their parsed
//! form and their translation to LTL.

mod catalog;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ltl::{Atom, Formula, Node};

pub use catalog::{conjoin, psp_to_ltl};
pub use parser::{parse_requirement_lines, parse_requirements, parse_sentence, LineOutcome, SentenceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("line {line}, column {column}: expected {}, found {found}", expected.join(" or "))]
    Parse {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("line {line}: duplicate requirement id `{id}` (first defined on line {first_line})")]
    DuplicateId { id: String, line: usize, first_line: usize },
}

impl FrontendError {
    pub fn line(&self) -> usize {
        match self {
            FrontendError::Parse { line, .. } | FrontendError::DuplicateId { line, .. } => *line,
        }
    }
}

/// The part of an execution a pattern constrains.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scope {
    Globally,
    Before(Formula),
    After(Formula),
    Between(Formula, Formula),
    AfterUntil(Formula, Formula),
}

impl Scope {
    pub fn kind(&self) -> &'static str {
        match self {
            Scope::Globally => "Globally",
            Scope::Before(_) => "Before",
            Scope::After(_) => "After",
            Scope::Between(..) => "Between",
            Scope::AfterUntil(..) => "AfterUntil",
        }
    }

    fn delimiters(&self) -> Vec<&Formula> {
        match self {
            Scope::Globally => vec![],
            Scope::Before(r) => vec![r],
            Scope::After(q) => vec![q],
            Scope::Between(q, r) | Scope::AfterUntil(q, r) => vec![q, r],
        }
    }
}

/// Pattern payloads are boolean combinations of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Universality(Formula),
    Absence(Formula),
    Existence(Formula),
    /// At most `bound` maximal stretches of states where the payload holds.
    BoundedExistence { payload: Formula, bound: u32 },
    /// `response` follows every `trigger`.
    Response { trigger: Formula, response: Formula },
    /// `cause` must have occurred before the first `trigger`.
    Precedence { trigger: Formula, cause: Formula },
    /// Every `trigger` is followed by `first` and later by `second`.
    ResponseChain { trigger: Formula, first: Formula, second: Formula },
    /// The first `trigger` is preceded by `first` and then `second`.
    PrecedenceChain { trigger: Formula, first: Formula, second: Formula },
}

impl Pattern {
    pub fn kind(&self) -> &'static str {
        match self {
            Pattern::Universality(_) => "Universality",
            Pattern::Absence(_) => "Absence",
            Pattern::Existence(_) => "Existence",
            Pattern::BoundedExistence { .. } => "BoundedExistence",
            Pattern::Response { .. } => "Response",
            Pattern::Precedence { .. } => "Precedence",
            Pattern::ResponseChain { .. } => "ResponseChain",
            Pattern::PrecedenceChain { .. } => "PrecedenceChain",
        }
    }

    /// The triggering condition, for patterns that have one.
    pub fn trigger(&self) -> Option<&Formula> {
        match self {
            Pattern::Response { trigger, .. }
            | Pattern::Precedence { trigger, .. }
            | Pattern::ResponseChain { trigger, .. }
            | Pattern::PrecedenceChain { trigger, .. } => Some(trigger),
            _ => None,
        }
    }

    fn payloads(&self) -> Vec<&Formula> {
        match self {
            Pattern::Universality(p) | Pattern::Absence(p) | Pattern::Existence(p) => vec![p],
            Pattern::BoundedExistence { payload, .. } => vec![payload],
            Pattern::Response { trigger, response } => vec![trigger, response],
            Pattern::Precedence { trigger, cause } => vec![trigger, cause],
            Pattern::ResponseChain { trigger, first, second }
            | Pattern::PrecedenceChain { trigger, first, second } => vec![trigger, first, second],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PspInstance {
    pub scope: Scope,
    pub pattern: Pattern,
}

impl PspInstance {
    /// Propositions and numerical variables mentioned anywhere in the
    /// requirement, scope delimiters included.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.scope
            .delimiters()
            .into_iter()
            .chain(self.pattern.payloads())
            .flat_map(|f| f.atoms().into_iter().map(|a| a.name().to_string()))
            .collect()
    }

    pub fn trigger(&self) -> Option<&Formula> {
        self.pattern.trigger()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub id: String,
    pub source_text: String,
    pub psp: PspInstance,
}

impl Requirement {
    pub fn symbols(&self) -> BTreeSet<String> {
        self.psp.symbols()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RequirementSet {
    pub requirements: Vec<Requirement>,
}

impl RequirementSet {
    pub fn new(requirements: Vec<Requirement>) -> Self {
        RequirementSet { requirements }
    }

    pub fn len(&self) -> usize {
        self.requirements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requirements.is_empty()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.requirements.iter().map(|r| r.id.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Requirement> {
        self.requirements.iter().find(|r| r.id == id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Requirement> {
        self.requirements.iter()
    }
}

impl<'a> IntoIterator for &'a RequirementSet {
    type Item = &'a Requirement;
    type IntoIter = std::slice::Iter<'a, Requirement>;

    fn into_iter(self) -> Self::IntoIter {
        self.requirements.iter()
    }
}

// Sentence rendering. The output re-parses to the same `PspInstance`.

struct Expr<'a>(&'a Formula);

impl fmt::Display for Expr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.0, 0)
    }
}

/// Scope delimiters are parenthesized when compound so that a top-level
/// `and` is never confused with the `Between ... and ...` keyword.
struct Delimiter<'a>(&'a Formula);

impl fmt::Display for Delimiter<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.node() {
            Node::And(..) | Node::Or(..) => write!(f, "({})", Expr(self.0)),
            _ => write_expr(f, self.0, 0),
        }
    }
}

const OR: u8 = 1;
const AND: u8 = 2;
const NOT: u8 = 3;

fn expr_prec(expr: &Formula) -> u8 {
    match expr.node() {
        Node::Or(..) => OR,
        Node::And(..) => AND,
        Node::Not(_) => NOT,
        _ => NOT + 1,
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, expr: &Formula, min: u8) -> fmt::Result {
    let wrap = expr_prec(expr) < min;
    if wrap {
        f.write_str("(")?;
    }
    match expr.node() {
        Node::Or(a, b) => {
            write_expr(f, a, OR)?;
            f.write_str(" or ")?;
            write_expr(f, b, OR + 1)?;
        }
        Node::And(a, b) => {
            write_expr(f, a, AND)?;
            f.write_str(" and ")?;
            write_expr(f, b, AND + 1)?;
        }
        Node::Not(a) => match a.node() {
            Node::Atom(Atom::Prop(name)) => write!(f, "not {name}")?,
            _ => {
                f.write_str("not (")?;
                write_expr(f, a, 0)?;
                f.write_str(")")?;
            }
        },
        Node::Atom(atom) => write!(f, "{atom}")?,
        Node::True => f.write_str("true")?,
        Node::False => f.write_str("false")?,
        // Payloads never contain temporal operators; fall back to LTL syntax.
        _ => write!(f, "({expr})")?,
    }
    if wrap {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Globally => f.write_str("Globally"),
            Scope::Before(r) => write!(f, "Before {}", Delimiter(r)),
            Scope::After(q) => write!(f, "After {}", Delimiter(q)),
            Scope::Between(q, r) => write!(f, "Between {} and {}", Delimiter(q), Delimiter(r)),
            Scope::AfterUntil(q, r) => write!(f, "After {} until {}", Delimiter(q), Delimiter(r)),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const ALWAYS: &str = "it is always the case that";
        match self {
            Pattern::Universality(p) => write!(f, "{ALWAYS} {} holds", Expr(p)),
            Pattern::Absence(p) => write!(f, "it is never the case that {} holds", Expr(p)),
            Pattern::Existence(p) => write!(f, "{} eventually holds", Expr(p)),
            Pattern::BoundedExistence { payload, bound } => write!(
                f,
                "transitions to states in which {} holds occur at most {bound} times",
                Expr(payload)
            ),
            Pattern::Response { trigger, response } => write!(
                f,
                "{ALWAYS} if {} holds, then {} eventually holds",
                Expr(trigger),
                Expr(response)
            ),
            Pattern::Precedence { trigger, cause } => write!(
                f,
                "{ALWAYS} if {} holds, then {} previously held",
                Expr(trigger),
                Expr(cause)
            ),
            Pattern::ResponseChain { trigger, first, second } => write!(
                f,
                "{ALWAYS} if {} holds, then {} eventually holds and is succeeded by {}",
                Expr(trigger),
                Expr(first),
                Expr(second)
            ),
            Pattern::PrecedenceChain { trigger, first, second } => write!(
                f,
                "{ALWAYS} if {} holds, then {} previously held and was followed by {}",
                Expr(trigger),
                Expr(first),
                Expr(second)
            ),
        }
    }
}

impl fmt::Display for PspInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}.", self.scope, self.pattern)
    }
}
