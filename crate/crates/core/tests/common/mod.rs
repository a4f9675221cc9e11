//! Random generators and brute-force lasso oracles shared by the
//! integration tests.
#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reqlint_core::ltl::{Atom, Formula, LassoTrace, Node, State};

pub const PROPS: [&str; 3] = ["a", "b", "c"];

/// Random formula with exactly `size` nodes over the given leaves, using
/// every operator of the AST.
pub fn random_formula(rng: &mut ChaCha8Rng, leaves: &[Formula], size: usize) -> Formula {
    assert!(size >= 1);
    if size == 1 {
        return match rng.random_range(0..20) {
            0 => Formula::tt(),
            1 => Formula::ff(),
            _ => leaves.choose(rng).unwrap().clone(),
        };
    }
    let unary = size == 2 || rng.random_bool(0.4);
    if unary {
        let inner = random_formula(rng, leaves, size - 1);
        return match rng.random_range(0..4) {
            0 => inner.not(),
            1 => inner.next(),
            2 => inner.eventually(),
            _ => inner.globally(),
        };
    }
    let left_size = rng.random_range(1..size - 1);
    let a = random_formula(rng, leaves, left_size);
    let b = random_formula(rng, leaves, size - 1 - left_size);
    match rng.random_range(0..6) {
        0 => a.and(b),
        1 => a.or(b),
        2 => a.implies(b),
        3 => a.until(b),
        4 => a.release(b),
        _ => a.weak_until(b),
    }
}

pub fn prop_leaves(names: &[&str]) -> Vec<Formula> {
    names.iter().map(|n| Formula::prop(*n)).collect()
}

pub fn random_state(rng: &mut ChaCha8Rng, names: &[&str]) -> State {
    names.iter().map(|n| (n.to_string(), rng.random_bool(0.5))).collect()
}

/// Random lasso with `|prefix| + |loop| <= max_len`.
pub fn random_lasso(rng: &mut ChaCha8Rng, names: &[&str], max_len: usize) -> LassoTrace {
    let total = rng.random_range(1..=max_len);
    let prefix_len = rng.random_range(0..total);
    let prefix = (0..prefix_len).map(|_| random_state(rng, names)).collect();
    let cycle = (prefix_len..total).map(|_| random_state(rng, names)).collect();
    LassoTrace::new(prefix, cycle).unwrap()
}

/// A formula compiled for evaluation on short lassos with one bit per
/// position.
pub struct BitFormula {
    atoms: Vec<Atom>,
    ops: Vec<Op>,
}

enum Op {
    True,
    False,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Next(usize),
    Eventually(usize),
    Globally(usize),
    Until(usize, usize),
    Release(usize, usize),
    WeakUntil(usize, usize),
}

impl BitFormula {
    pub fn new(formula: &Formula) -> Self {
        let mut compiled = BitFormula { atoms: Vec::new(), ops: Vec::new() };
        compiled.compile(formula);
        compiled
    }

    /// Distinct atoms; letters are bitsets over this list.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn compile(&mut self, f: &Formula) -> usize {
        let op = match f.node() {
            Node::True => Op::True,
            Node::False => Op::False,
            Node::Atom(atom) => {
                let idx = match self.atoms.iter().position(|a| a == atom) {
                    Some(i) => i,
                    None => {
                        self.atoms.push(atom.clone());
                        self.atoms.len() - 1
                    }
                };
                Op::Atom(idx)
            }
            Node::Not(a) => Op::Not(self.compile(a)),
            Node::Next(a) => Op::Next(self.compile(a)),
            Node::Eventually(a) => Op::Eventually(self.compile(a)),
            Node::Globally(a) => Op::Globally(self.compile(a)),
            Node::And(a, b) => Op::And(self.compile(a), self.compile(b)),
            Node::Or(a, b) => Op::Or(self.compile(a), self.compile(b)),
            Node::Implies(a, b) => Op::Implies(self.compile(a), self.compile(b)),
            Node::Until(a, b) => Op::Until(self.compile(a), self.compile(b)),
            Node::Release(a, b) => Op::Release(self.compile(a), self.compile(b)),
            Node::WeakUntil(a, b) => Op::WeakUntil(self.compile(a), self.compile(b)),
        };
        self.ops.push(op);
        self.ops.len() - 1
    }

    /// Truth at position 0 of the lasso `letters[..loop_start] ·
    /// letters[loop_start..]^ω`, where each letter is a bitset over
    /// [`BitFormula::atoms`].
    pub fn eval(&self, letters: &[u32], loop_start: usize) -> bool {
        let n = letters.len();
        let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let succ = |i: usize| if i + 1 < n { i + 1 } else { loop_start };
        let next_of = |v: u32| (0..n).filter(|&i| v >> succ(i) & 1 == 1).fold(0u32, |m, i| m | 1 << i);
        let fix = |init: u32, step: &dyn Fn(usize, bool) -> bool| -> u32 {
            let mut v = init;
            loop {
                let mut w = v;
                for i in (0..n).rev() {
                    let later = w >> succ(i) & 1 == 1;
                    if step(i, later) {
                        w |= 1 << i;
                    } else {
                        w &= !(1 << i);
                    }
                }
                if w == v {
                    return v;
                }
                v = w;
            }
        };
        let mut vals: Vec<u32> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let bit = |v: u32, i: usize| v >> i & 1 == 1;
            let v = match *op {
                Op::True => all,
                Op::False => 0,
                Op::Atom(k) => (0..n).filter(|&i| letters[i] >> k & 1 == 1).fold(0, |m, i| m | 1 << i),
                Op::Not(a) => !vals[a] & all,
                Op::And(a, b) => vals[a] & vals[b],
                Op::Or(a, b) => vals[a] | vals[b],
                Op::Implies(a, b) => (!vals[a] | vals[b]) & all,
                Op::Next(a) => next_of(vals[a]),
                Op::Eventually(a) => {
                    let a = vals[a];
                    fix(0, &|i, later| bit(a, i) || later)
                }
                Op::Globally(a) => {
                    let a = vals[a];
                    fix(all, &|i, later| bit(a, i) && later)
                }
                Op::Until(a, b) => {
                    let (a, b) = (vals[a], vals[b]);
                    fix(0, &|i, later| bit(b, i) || (bit(a, i) && later))
                }
                Op::WeakUntil(a, b) => {
                    let (a, b) = (vals[a], vals[b]);
                    fix(all, &|i, later| bit(b, i) || (bit(a, i) && later))
                }
                Op::Release(a, b) => {
                    let (a, b) = (vals[a], vals[b]);
                    fix(all, &|i, later| bit(b, i) && (bit(a, i) || later))
                }
            };
            vals.push(v);
        }
        vals.last().unwrap() & 1 == 1
    }
}

/// Every lasso with `1 <= |prefix| + |loop| <= max_len` over `alphabet`,
/// as `(letters, loop_start)`. Stops early when `visit` returns true and
/// reports whether it did.
pub fn any_lasso(alphabet: &[u32], max_len: usize, mut visit: impl FnMut(&[u32], usize) -> bool) -> bool {
    if alphabet.is_empty() {
        return false;
    }
    for len in 1..=max_len {
        let mut digits = vec![0usize; len];
        loop {
            let letters: Vec<u32> = digits.iter().map(|&d| alphabet[d]).collect();
            for loop_start in 0..len {
                if visit(&letters, loop_start) {
                    return true;
                }
            }
            let mut k = 0;
            while k < len {
                digits[k] += 1;
                if digits[k] < alphabet.len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == len {
                break;
            }
        }
    }
    false
}

/// Brute-force satisfiability over every valuation of the formula's
/// (boolean) atoms.
pub fn boolean_oracle_sat(formula: &Formula, max_len: usize) -> bool {
    let compiled = BitFormula::new(formula);
    let alphabet: Vec<u32> = (0..1u32 << compiled.atoms().len()).collect();
    any_lasso(&alphabet, max_len, |letters, l| compiled.eval(letters, l))
}

/// Converts a bitmask lasso back into a named trace over `atoms`.
pub fn to_trace(atoms: &[Atom], letters: &[u32], loop_start: usize) -> LassoTrace {
    let state = |letter: u32| -> State {
        atoms.iter().enumerate().map(|(k, a)| (a.name().to_string(), letter >> k & 1 == 1)).collect()
    };
    let states: Vec<State> = letters.iter().map(|&l| state(l)).collect();
    LassoTrace::new(states[..loop_start].to_vec(), states[loop_start..].to_vec()).unwrap()
}
