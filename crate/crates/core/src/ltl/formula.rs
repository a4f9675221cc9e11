use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constant::Constant;

/// Relation of a numerical constraint atom. Other comparisons are desugared
/// into boolean combinations of these two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rel {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "=")]
    Eq,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Eq => "=",
        }
    }

    pub fn holds(self, value: &Constant, constant: &Constant) -> bool {
        match self {
            Rel::Lt => value < constant,
            Rel::Eq => value == constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Prop(String),
    Constraint { var: String, rel: Rel, constant: Constant },
}

impl Atom {
    pub fn prop(name: impl Into<String>) -> Self {
        Atom::Prop(name.into())
    }

    pub fn constraint(var: impl Into<String>, rel: Rel, constant: Constant) -> Self {
        Atom::Constraint { var: var.into(), rel, constant }
    }

    /// Name of the proposition or numerical variable the atom reads.
    pub fn name(&self) -> &str {
        match self {
            Atom::Prop(name) => name,
            Atom::Constraint { var, .. } => var,
        }
    }

    pub fn is_constraint(&self) -> bool {
        matches!(self, Atom::Constraint { .. })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Prop(name) => f.write_str(name),
            Atom::Constraint { var, rel, constant } => {
                write!(f, "{var} {} {constant}", rel.symbol())
            }
        }
    }
}

/// Matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    True,
    False,
    Atom(Atom),
    Not(Formula),
    And(Formula, Formula),
    Or(Formula, Formula),
    Implies(Formula, Formula),
    Next(Formula),
    Eventually(Formula),
    Globally(Formula),
    Until(Formula, Formula),
    Release(Formula, Formula),
    WeakUntil(Formula, Formula),
}

/// An immutable, structurally shared LTL formula.
///
/// Equality, ordering and hashing are structural, so formulas can be used
/// directly as set and map keys.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula(Arc<Node>);

impl Formula {
    pub fn new(node: Node) -> Self {
        Formula(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn tt() -> Self {
        Formula::new(Node::True)
    }

    pub fn ff() -> Self {
        Formula::new(Node::False)
    }

    pub fn atom(atom: Atom) -> Self {
        Formula::new(Node::Atom(atom))
    }

    pub fn prop(name: impl Into<String>) -> Self {
        Formula::atom(Atom::prop(name))
    }

    pub fn constraint(var: impl Into<String>, rel: Rel, constant: Constant) -> Self {
        Formula::atom(Atom::constraint(var, rel, constant))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::new(Node::Not(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::new(Node::And(self, other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::new(Node::Or(self, other))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::new(Node::Implies(self, other))
    }

    pub fn next(self) -> Self {
        Formula::new(Node::Next(self))
    }

    pub fn eventually(self) -> Self {
        Formula::new(Node::Eventually(self))
    }

    pub fn globally(self) -> Self {
        Formula::new(Node::Globally(self))
    }

    pub fn until(self, other: Formula) -> Self {
        Formula::new(Node::Until(self, other))
    }

    pub fn release(self, other: Formula) -> Self {
        Formula::new(Node::Release(self, other))
    }

    pub fn weak_until(self, other: Formula) -> Self {
        Formula::new(Node::WeakUntil(self, other))
    }

    /// Left-nested conjunction in iteration order; `true` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or_else(Formula::tt)
    }

    /// Left-nested disjunction in iteration order; `false` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::ff)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self.node() {
            Node::True | Node::False | Node::Atom(_) => vec![],
            Node::Not(a) | Node::Next(a) | Node::Eventually(a) | Node::Globally(a) => vec![a],
            Node::And(a, b)
            | Node::Or(a, b)
            | Node::Implies(a, b)
            | Node::Until(a, b)
            | Node::Release(a, b)
            | Node::WeakUntil(a, b) => vec![a, b],
        }
    }

    /// Number of nodes in the formula tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Atoms in first-occurrence order (left to right, pre-order).
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Node::Atom(atom) = f.node() {
                if seen.insert(atom) {
                    out.push(atom);
                }
            }
        });
        out
    }

    /// Names of propositions and numerical variables, first-occurrence order.
    pub fn symbol_names(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.atoms()
            .into_iter()
            .map(Atom::name)
            .filter(|name| seen.insert(*name))
            .collect()
    }

    pub fn has_constraints(&self) -> bool {
        self.atoms().iter().any(|a| a.is_constraint())
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for child in self.children() {
            child.visit(f);
        }
    }

    /// Rebuilds the formula with every atom replaced by `subst(atom)`.
    pub fn map_atoms(&self, subst: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        let node = match self.node() {
            Node::True | Node::False => return self.clone(),
            Node::Atom(atom) => return subst(atom),
            Node::Not(a) => Node::Not(a.map_atoms(subst)),
            Node::Next(a) => Node::Next(a.map_atoms(subst)),
            Node::Eventually(a) => Node::Eventually(a.map_atoms(subst)),
            Node::Globally(a) => Node::Globally(a.map_atoms(subst)),
            Node::And(a, b) => Node::And(a.map_atoms(subst), b.map_atoms(subst)),
            Node::Or(a, b) => Node::Or(a.map_atoms(subst), b.map_atoms(subst)),
            Node::Implies(a, b) => Node::Implies(a.map_atoms(subst), b.map_atoms(subst)),
            Node::Until(a, b) => Node::Until(a.map_atoms(subst), b.map_atoms(subst)),
            Node::Release(a, b) => Node::Release(a.map_atoms(subst), b.map_atoms(subst)),
            Node::WeakUntil(a, b) => Node::WeakUntil(a.map_atoms(subst), b.map_atoms(subst)),
        };
        Formula::new(node)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Atom> for Formula {
    fn from(atom: Atom) -> Self {
        Formula::atom(atom)
    }
}
