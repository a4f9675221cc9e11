//! Ultimately periodic traces and the reference LTL semantics over them.
//!
//! The evaluator here works position by position over `prefix · loop`, with
//! least/greatest fixpoints around the loop for the temporal operators. It
//! shares no code with the tableau engine and is used to re-verify every
//! witness the engine produces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::{Atom, Formula, Node};
use crate::constant::Constant;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("state {position} does not assign proposition `{name}`")]
    UncoveredProposition { name: String, position: usize },
    #[error("state {position} does not assign a value to variable `{name}`")]
    UncoveredVariable { name: String, position: usize },
    #[error("numerical constraint `{0}` cannot be evaluated on a boolean trace")]
    NumericAtom(String),
    #[error("lasso loop must contain at least one state")]
    EmptyLoop,
}

pub type State = BTreeMap<String, bool>;

/// The infinite word `prefix · loop^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LassoTrace {
    pub prefix: Vec<State>,
    #[serde(rename = "loop")]
    pub cycle: Vec<State>,
}

impl LassoTrace {
    pub fn new(prefix: Vec<State>, cycle: Vec<State>) -> Result<Self, EvalError> {
        if cycle.is_empty() {
            return Err(EvalError::EmptyLoop);
        }
        Ok(LassoTrace { prefix, cycle })
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn state(&self, position: usize) -> &State {
        if position < self.prefix.len() {
            &self.prefix[position]
        } else {
            &self.cycle[(position - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn states(&self) -> impl Iterator<Item = &State> {
        self.prefix.iter().chain(self.cycle.iter())
    }

    /// Same infinite word with one loop iteration moved into the prefix.
    pub fn unrolled(&self) -> LassoTrace {
        let mut prefix = self.prefix.clone();
        prefix.extend(self.cycle.iter().cloned());
        LassoTrace { prefix, cycle: self.cycle.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValuedState {
    pub props: BTreeMap<String, bool>,
    pub values: BTreeMap<String, Constant>,
}

/// A lasso whose states also carry a concrete value per numerical variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuedLasso {
    pub prefix: Vec<ValuedState>,
    #[serde(rename = "loop")]
    pub cycle: Vec<ValuedState>,
}

impl ValuedLasso {
    pub fn state(&self, position: usize) -> &ValuedState {
        if position < self.prefix.len() {
            &self.prefix[position]
        } else {
            &self.cycle[(position - self.prefix.len()) % self.cycle.len()]
        }
    }
}

/// Whether `trace` satisfies `formula`. The formula must be boolean-only.
pub fn eval_on_lasso(formula: &Formula, trace: &LassoTrace) -> Result<bool, EvalError> {
    if trace.cycle.is_empty() {
        return Err(EvalError::EmptyLoop);
    }
    let values = evaluate(formula, trace.prefix.len(), trace.len(), &mut |atom, position| {
        match atom {
            Atom::Prop(name) => trace.state(position).get(name).copied().ok_or_else(|| {
                EvalError::UncoveredProposition { name: name.clone(), position }
            }),
            Atom::Constraint { .. } => Err(EvalError::NumericAtom(atom.to_string())),
        }
    })?;
    Ok(values[0])
}

/// Whether a valued trace satisfies a formula that may contain numerical
/// constraint atoms.
pub fn eval_on_valued_lasso(formula: &Formula, trace: &ValuedLasso) -> Result<bool, EvalError> {
    if trace.cycle.is_empty() {
        return Err(EvalError::EmptyLoop);
    }
    let len = trace.prefix.len() + trace.cycle.len();
    let values = evaluate(formula, trace.prefix.len(), len, &mut |atom, position| {
        let state = trace.state(position);
        match atom {
            Atom::Prop(name) => state.props.get(name).copied().ok_or_else(|| {
                EvalError::UncoveredProposition { name: name.clone(), position }
            }),
            Atom::Constraint { var, rel, constant } => state
                .values
                .get(var)
                .map(|value| rel.holds(value, constant))
                .ok_or_else(|| EvalError::UncoveredVariable { name: var.clone(), position }),
        }
    })?;
    Ok(values[0])
}

type AtomValue<'a> = dyn FnMut(&Atom, usize) -> Result<bool, EvalError> + 'a;

/// Truth value of `formula` at each of the `len` positions of a lasso whose
/// loop starts at `loop_start`.
fn evaluate(
    formula: &Formula,
    loop_start: usize,
    len: usize,
    atom_value: &mut AtomValue<'_>,
) -> Result<Vec<bool>, EvalError> {
    let succ = |i: usize| if i + 1 < len { i + 1 } else { loop_start };
    let eval = |f: &Formula, atom_value: &mut AtomValue<'_>| evaluate(f, loop_start, len, atom_value);

    let values = match formula.node() {
        Node::True => vec![true; len],
        Node::False => vec![false; len],
        Node::Atom(atom) => (0..len).map(|i| atom_value(atom, i)).collect::<Result<_, _>>()?,
        Node::Not(a) => eval(a, atom_value)?.into_iter().map(|v| !v).collect(),
        Node::And(a, b) => zip(eval(a, atom_value)?, eval(b, atom_value)?, |x, y| x && y),
        Node::Or(a, b) => zip(eval(a, atom_value)?, eval(b, atom_value)?, |x, y| x || y),
        Node::Implies(a, b) => zip(eval(a, atom_value)?, eval(b, atom_value)?, |x, y| !x || y),
        Node::Next(a) => {
            let a = eval(a, atom_value)?;
            (0..len).map(|i| a[succ(i)]).collect()
        }
        Node::Eventually(a) => {
            let a = eval(a, atom_value)?;
            fixpoint(len, false, succ, |i, later| a[i] || later)
        }
        Node::Globally(a) => {
            let a = eval(a, atom_value)?;
            fixpoint(len, true, succ, |i, later| a[i] && later)
        }
        Node::Until(a, b) => {
            let (a, b) = (eval(a, atom_value)?, eval(b, atom_value)?);
            fixpoint(len, false, succ, |i, later| b[i] || (a[i] && later))
        }
        Node::WeakUntil(a, b) => {
            let (a, b) = (eval(a, atom_value)?, eval(b, atom_value)?);
            fixpoint(len, true, succ, |i, later| b[i] || (a[i] && later))
        }
        Node::Release(a, b) => {
            let (a, b) = (eval(a, atom_value)?, eval(b, atom_value)?);
            fixpoint(len, true, succ, |i, later| b[i] && (a[i] || later))
        }
    };
    Ok(values)
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Iterates `v[i] = step(i, v[succ(i)])` from `init` until stable. Starting
/// from `false` yields the least fixpoint, from `true` the greatest.
fn fixpoint(
    len: usize,
    init: bool,
    succ: impl Fn(usize) -> usize,
    step: impl Fn(usize, bool) -> bool,
) -> Vec<bool> {
    let mut values = vec![init; len];
    loop {
        let mut changed = false;
        for i in (0..len).rev() {
            let next = step(i, values[succ(i)]);
            if next != values[i] {
                values[i] = next;
                changed = true;
            }
        }
        if !changed {
            return values;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn state(pairs: &[(&str, bool)]) -> State {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn p() -> Formula {
        Formula::prop("p")
    }
    fn q() -> Formula {
        Formula::prop("q")
    }

    #[test]
    fn globally_on_constant_loop() {
        let trace = LassoTrace::new(vec![], vec![state(&[("p", true)])]).unwrap();
        assert!(eval_on_lasso(&p().globally(), &trace).unwrap());
    }

    #[test]
    fn eventually_never_fulfilled() {
        let trace = LassoTrace::new(vec![state(&[("q", false)])], vec![state(&[("q", false)])]).unwrap();
        assert!(!eval_on_lasso(&q().eventually(), &trace).unwrap());
    }

    #[test]
    fn response_holds_vacuously_without_messages() {
        let f = Formula::prop("msg").implies(Formula::prop("rcv").eventually()).globally();
        let quiet = state(&[("msg", false), ("rcv", false)]);
        let trace = LassoTrace::new(vec![quiet.clone()], vec![quiet]).unwrap();
        assert!(eval_on_lasso(&f, &trace).unwrap());
    }

    #[test]
    fn until_and_release_on_loop() {
        let trace = LassoTrace::new(
            vec![state(&[("p", true), ("q", false)])],
            vec![state(&[("p", true), ("q", false)]), state(&[("p", false), ("q", true)])],
        )
        .unwrap();
        assert!(eval_on_lasso(&p().until(q()), &trace).unwrap());
        assert!(eval_on_lasso(&p().until(q()).globally(), &trace.unrolled()).unwrap());
        assert!(!eval_on_lasso(&p().globally(), &trace).unwrap());
        assert!(eval_on_lasso(&q().eventually().globally(), &trace).unwrap());
        assert!(!eval_on_lasso(&q().release(p()), &trace).unwrap());
        assert!(eval_on_lasso(&p().weak_until(q()), &trace).unwrap());
    }

    #[test]
    fn missing_proposition_is_reported() {
        let trace = LassoTrace::new(vec![], vec![state(&[("p", true)])]).unwrap();
        assert_eq!(
            eval_on_lasso(&q(), &trace),
            Err(EvalError::UncoveredProposition { name: "q".into(), position: 0 })
        );
    }

    #[test]
    fn empty_loop_is_rejected() {
        assert_eq!(LassoTrace::new(vec![], vec![]), Err(EvalError::EmptyLoop));
    }

    #[test]
    fn valued_trace_evaluates_constraints() {
        use crate::ltl::Rel;
        let mut s = ValuedState::default();
        s.values.insert("x".into(), Constant::from_integer(19));
        let trace = ValuedLasso { prefix: vec![], cycle: vec![s] };
        let lt20 = Formula::constraint("x", Rel::Lt, Constant::from_integer(20));
        let eq20 = Formula::constraint("x", Rel::Eq, Constant::from_integer(20));
        assert!(eval_on_valued_lasso(&lt20.globally(), &trace).unwrap());
        assert!(!eval_on_valued_lasso(&eq20.eventually(), &trace).unwrap());
    }
}
