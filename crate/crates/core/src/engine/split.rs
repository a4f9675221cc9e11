//! Preprocessing of NNF queries: constant folding and the split of a
//! conjunction into groups over disjoint propositions, plus the merge of
//! the per-group lassos into one.

use std::collections::{BTreeMap, BTreeSet};

use crate::ltl::{Formula, LassoTrace, Node, State};

/// Constant folding on an NNF formula. Complementary literals inside one
/// conjunction (disjunction) fold to `false` (`true`).
pub(crate) fn simplify(formula: &Formula) -> Formula {
    match formula.node() {
        Node::True | Node::False | Node::Atom(_) | Node::Not(_) => formula.clone(),
        Node::And(..) => {
            let mut parts = Vec::new();
            flatten(formula, true, &mut parts);
            junction(parts.into_iter().map(simplify).collect(), true)
        }
        Node::Or(..) => {
            let mut parts = Vec::new();
            flatten(formula, false, &mut parts);
            junction(parts.into_iter().map(simplify).collect(), false)
        }
        Node::Next(a) => match simplify(a) {
            c if is_const(&c) => c,
            a => a.next(),
        },
        Node::Eventually(a) => match simplify(a) {
            c if is_const(&c) => c,
            a if matches!(a.node(), Node::Eventually(_)) => a,
            a => a.eventually(),
        },
        Node::Globally(a) => match simplify(a) {
            c if is_const(&c) => c,
            a if matches!(a.node(), Node::Globally(_)) => a,
            a => a.globally(),
        },
        Node::Until(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match (a.node(), b.node()) {
                (_, Node::True | Node::False) | (Node::False, _) => b,
                (Node::True, _) => b.eventually(),
                _ => a.until(b),
            }
        }
        Node::Release(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match (a.node(), b.node()) {
                (_, Node::True | Node::False) | (Node::True, _) => b,
                (Node::False, _) => b.globally(),
                _ => a.release(b),
            }
        }
        Node::Implies(..) | Node::WeakUntil(..) => unreachable!("input is in negation normal form"),
    }
}

fn is_const(f: &Formula) -> bool {
    matches!(f.node(), Node::True | Node::False)
}

fn flatten<'a>(f: &'a Formula, conj: bool, out: &mut Vec<&'a Formula>) {
    match f.node() {
        Node::And(a, b) if conj => {
            flatten(a, conj, out);
            flatten(b, conj, out);
        }
        Node::Or(a, b) if !conj => {
            flatten(a, conj, out);
            flatten(b, conj, out);
        }
        _ => out.push(f),
    }
}

fn junction(parts: Vec<Formula>, conj: bool) -> Formula {
    let (unit, zero) = if conj { (Formula::tt(), Formula::ff()) } else { (Formula::ff(), Formula::tt()) };
    let mut seen = BTreeSet::new();
    let mut kept = Vec::new();
    for part in parts {
        let mut inner = Vec::new();
        flatten(&part, conj, &mut inner);
        for p in inner {
            if *p == zero {
                return zero;
            }
            if *p != unit && seen.insert(p.clone()) {
                kept.push(p.clone());
            }
        }
    }
    let clash = kept.iter().any(|p| match p.node() {
        Node::Not(atom) => seen.contains(atom),
        _ => false,
    });
    if clash {
        return zero;
    }
    if conj {
        Formula::conjunction(kept)
    } else {
        Formula::disjunction(kept)
    }
}

/// Top-level conjuncts, with `G (a & b)` read as `G a & G b`.
fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f.node() {
        Node::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        Node::Globally(inner) if matches!(inner.node(), Node::And(..)) => {
            let mut parts = Vec::new();
            conjuncts(inner, &mut parts);
            out.extend(parts.into_iter().map(Formula::globally));
        }
        _ => out.push(f.clone()),
    }
}

/// Groups of conjuncts whose propositions are disjoint from every other
/// group, smallest first. Each group is returned as one conjunction.
pub(crate) fn independent_groups(formula: &Formula) -> Vec<Formula> {
    let mut parts = Vec::new();
    conjuncts(formula, &mut parts);

    let mut parent: Vec<usize> = (0..parts.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut owner: BTreeMap<String, usize> = BTreeMap::new();
    for (i, part) in parts.iter().enumerate() {
        for name in part.symbol_names() {
            match owner.get(name) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
                None => {
                    owner.insert(name.to_string(), i);
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<Formula>> = BTreeMap::new();
    let mut order = Vec::new();
    for (i, part) in parts.into_iter().enumerate() {
        let root = find(&mut parent, i);
        if !groups.contains_key(&root) {
            order.push(root);
        }
        groups.entry(root).or_default().push(part);
    }
    let mut out: Vec<Formula> = order.into_iter().map(|r| Formula::conjunction(groups.remove(&r).unwrap())).collect();
    out.sort_by_key(Formula::size);
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Pointwise union of lassos over disjoint propositions. Propositions in
/// `names` that no lasso mentions are set false.
pub(crate) fn merge(lassos: &[LassoTrace], names: &[&str]) -> LassoTrace {
    let prefix = lassos.iter().map(|l| l.prefix.len()).max().unwrap_or(0);
    let cycle = lassos.iter().map(|l| l.cycle.len()).fold(1, |acc, n| acc / gcd(acc, n) * n);
    let at = |t: usize| -> State {
        let mut state: State = names.iter().map(|n| (n.to_string(), false)).collect();
        for lasso in lassos {
            let position = if t < lasso.prefix.len() {
                t
            } else {
                lasso.prefix.len() + (t - lasso.prefix.len()) % lasso.cycle.len()
            };
            state.extend(lasso.state(position).iter().map(|(k, v)| (k.clone(), *v)));
        }
        state
    };
    LassoTrace { prefix: (0..prefix).map(at).collect(), cycle: (prefix..prefix + cycle).map(at).collect() }
}
