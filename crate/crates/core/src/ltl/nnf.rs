use std::collections::HashSet;

use super::formula::{Formula, Node};

/// Negation normal form: negation only directly above atoms, no implication,
/// no weak-until. Release appears as the dual of until.
pub fn to_nnf(formula: &Formula) -> Formula {
    match formula.node() {
        Node::True | Node::False | Node::Atom(_) => formula.clone(),
        Node::Not(inner) => negate(inner),
        Node::And(a, b) => to_nnf(a).and(to_nnf(b)),
        Node::Or(a, b) => to_nnf(a).or(to_nnf(b)),
        Node::Implies(a, b) => negate(a).or(to_nnf(b)),
        Node::Next(a) => to_nnf(a).next(),
        Node::Eventually(a) => to_nnf(a).eventually(),
        Node::Globally(a) => to_nnf(a).globally(),
        Node::Until(a, b) => to_nnf(a).until(to_nnf(b)),
        Node::Release(a, b) => to_nnf(a).release(to_nnf(b)),
        // a W b == b R (a | b)
        Node::WeakUntil(a, b) => to_nnf(b).release(to_nnf(a).or(to_nnf(b))),
    }
}

/// NNF of `!formula`.
fn negate(formula: &Formula) -> Formula {
    match formula.node() {
        Node::True => Formula::ff(),
        Node::False => Formula::tt(),
        Node::Atom(_) => formula.clone().not(),
        Node::Not(inner) => to_nnf(inner),
        Node::And(a, b) => negate(a).or(negate(b)),
        Node::Or(a, b) => negate(a).and(negate(b)),
        Node::Implies(a, b) => to_nnf(a).and(negate(b)),
        Node::Next(a) => negate(a).next(),
        Node::Eventually(a) => negate(a).globally(),
        Node::Globally(a) => negate(a).eventually(),
        Node::Until(a, b) => negate(a).release(negate(b)),
        Node::Release(a, b) => negate(a).until(negate(b)),
        // !(a W b) == !b U (!a & !b)
        Node::WeakUntil(a, b) => negate(b).until(negate(a).and(negate(b))),
    }
}

pub fn is_nnf(formula: &Formula) -> bool {
    match formula.node() {
        Node::True | Node::False | Node::Atom(_) => true,
        Node::Not(inner) => matches!(inner.node(), Node::Atom(_)),
        Node::Implies(..) | Node::WeakUntil(..) => false,
        _ => formula.children().into_iter().all(is_nnf),
    }
}

/// Distinct subformulas, children before parents. A negated atom is a single
/// literal and does not contribute the bare atom.
pub fn closure(formula: &Formula) -> Vec<Formula> {
    fn walk(f: &Formula, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
        if seen.contains(f) {
            return;
        }
        let literal = matches!(f.node(), Node::Not(inner) if matches!(inner.node(), Node::Atom(_)));
        if !literal {
            for child in f.children() {
                walk(child, seen, out);
            }
        }
        seen.insert(f.clone());
        out.push(f.clone());
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    walk(formula, &mut seen, &mut out);
    out
}
