//! Tableau states over the closure of an NNF formula.
//!
//! A state is the set `now` of closure members that hold at a position. It
//! is built from a seed set by saturation: conjunctions, `G` and the right
//! side of `R` are added outright, while `|`, `F`, `U` and the left side of
//! `R` are choice points. States are enumerated lazily, one branch at a time.

use std::collections::HashMap;
use std::time::Instant;

use fixedbitset::FixedBitSet;

use super::Limit;
use crate::ltl::{closure, Atom, Formula, Node};

#[derive(Debug, Clone, Copy)]
enum Kind {
    True,
    False,
    /// Proposition index and polarity.
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Eventually(usize),
    Globally(usize),
    Until(usize, usize),
    Release(usize, usize),
}

pub(crate) struct Tableau {
    kinds: Vec<Kind>,
    pub(crate) props: Vec<String>,
    /// Closure index of `p` and `!p` per proposition, when present.
    literals: Vec<[Option<usize>; 2]>,
    /// `F a` / `a U b` members with the index of what fulfils them.
    pub(crate) eventualities: Vec<(usize, usize)>,
    /// Number of `F`/`U` nodes below each member, itself included.
    promises: Vec<usize>,
    pub(crate) root: usize,
}

impl Tableau {
    /// `formula` must be in negation normal form over propositions.
    pub(crate) fn new(formula: &Formula) -> Self {
        let members = closure(formula);
        let index: HashMap<&Formula, usize> = members.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut props: Vec<String> = Vec::new();
        let mut literals: Vec<[Option<usize>; 2]> = Vec::new();
        let mut prop_index = |name: &str, literals: &mut Vec<[Option<usize>; 2]>| {
            props.iter().position(|p| p == name).unwrap_or_else(|| {
                props.push(name.to_string());
                literals.push([None, None]);
                props.len() - 1
            })
        };
        let mut kinds = Vec::with_capacity(members.len());
        for (i, f) in members.iter().enumerate() {
            let kind = match f.node() {
                Node::True => Kind::True,
                Node::False => Kind::False,
                Node::Atom(Atom::Prop(name)) => {
                    let p = prop_index(name, &mut literals);
                    literals[p][1] = Some(i);
                    Kind::Lit(p, true)
                }
                Node::Not(inner) => match inner.node() {
                    Node::Atom(Atom::Prop(name)) => {
                        let p = prop_index(name, &mut literals);
                        literals[p][0] = Some(i);
                        Kind::Lit(p, false)
                    }
                    _ => panic!("formula is not in negation normal form over propositions: {f}"),
                },
                Node::And(a, b) => Kind::And(index[a], index[b]),
                Node::Or(a, b) => Kind::Or(index[a], index[b]),
                Node::Next(a) => Kind::Next(index[a]),
                Node::Eventually(a) => Kind::Eventually(index[a]),
                Node::Globally(a) => Kind::Globally(index[a]),
                Node::Until(a, b) => Kind::Until(index[a], index[b]),
                Node::Release(a, b) => Kind::Release(index[a], index[b]),
                Node::Atom(Atom::Constraint { .. }) | Node::Implies(..) | Node::WeakUntil(..) => {
                    panic!("formula is not in negation normal form over propositions: {f}")
                }
            };
            kinds.push(kind);
        }
        let eventualities = kinds
            .iter()
            .enumerate()
            .filter_map(|(i, k)| match *k {
                Kind::Eventually(a) => Some((i, a)),
                Kind::Until(_, b) => Some((i, b)),
                _ => None,
            })
            .collect();
        let mut promises = vec![usize::MAX; kinds.len()];
        for i in 0..kinds.len() {
            count_promises(&kinds, i, &mut promises);
        }
        Tableau { root: index[formula], kinds, props, literals, eventualities, promises }
    }

    pub(crate) fn len(&self) -> usize {
        self.kinds.len()
    }

    pub(crate) fn seed(&self, members: &[usize]) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.len());
        for &m in members {
            set.insert(m);
        }
        set
    }

    /// What the successor of a state must satisfy.
    pub(crate) fn obligations(&self, now: &FixedBitSet) -> FixedBitSet {
        let mut next = FixedBitSet::with_capacity(self.len());
        for i in now.ones() {
            match self.kinds[i] {
                Kind::Next(a) => next.insert(a),
                Kind::Globally(_) => next.insert(i),
                Kind::Eventually(a) | Kind::Until(_, a) if !now.contains(a) => next.insert(i),
                Kind::Release(a, _) if !now.contains(a) => next.insert(i),
                _ => {}
            }
        }
        next
    }

    /// Eventualities that are not pending in `now`.
    pub(crate) fn fulfilled(&self, now: &FixedBitSet) -> FixedBitSet {
        let mut fair = FixedBitSet::with_capacity(self.eventualities.len());
        for (j, &(e, target)) in self.eventualities.iter().enumerate() {
            if !now.contains(e) || now.contains(target) {
                fair.insert(j);
            }
        }
        fair
    }

    /// Whether a member of `now` promises something that can never hold
    /// beside the `G` members of `now`, which hold at every later position.
    /// Such a set has no fair continuation, however it is completed.
    fn doomed(&self, now: &FixedBitSet, targets: &mut Targets) -> bool {
        // Targets are checked by plain expansion, without nested cuts.
        if targets.depth > 0 {
            return false;
        }
        targets.fuel = DOOM_FUEL;
        let mut invariants = FixedBitSet::with_capacity(self.len());
        invariants.extend(now.ones().filter(|&i| matches!(self.kinds[i], Kind::Globally(_))));
        self.eventualities.iter().any(|&(e, target)| {
            if !now.contains(e) {
                return false;
            }
            let mut seed = invariants.clone();
            seed.insert(target);
            if let Some(&possible) = targets.memo.get(&seed) {
                return !possible;
            }
            targets.depth += 1;
            let outcome = Expander::new(self, &seed).next_state(self, Some(targets), None);
            targets.depth -= 1;
            // Out of fuel counts as possible.
            let possible = !matches!(outcome, Ok(None));
            targets.memo.insert(seed, possible);
            !possible
        })
    }

    /// Truth value of each proposition; propositions left open are false.
    pub(crate) fn valuation<'a>(&'a self, now: &'a FixedBitSet) -> impl Iterator<Item = (&'a str, bool)> + 'a {
        self.props
            .iter()
            .zip(&self.literals)
            .map(move |(name, lits)| (name.as_str(), lits[1].is_some_and(|i| now.contains(i))))
    }

    fn complement(&self, i: usize) -> Option<usize> {
        match self.kinds[i] {
            Kind::Lit(p, positive) => self.literals[p][usize::from(!positive)],
            _ => None,
        }
    }

    /// Adds the agenda to `now`. Returns false on a contradiction.
    fn saturate(&self, frame: &mut Frame) -> bool {
        while let Some(i) = frame.agenda.pop() {
            if frame.now.contains(i) {
                continue;
            }
            frame.now.insert(i);
            match self.kinds[i] {
                Kind::True | Kind::Next(_) => {}
                Kind::False => return false,
                Kind::Lit(..) => {
                    if self.complement(i).is_some_and(|c| frame.now.contains(c)) {
                        return false;
                    }
                }
                Kind::And(a, b) => frame.agenda.extend([a, b]),
                Kind::Globally(a) => {
                    frame.fresh = true;
                    frame.agenda.push(a);
                }
                Kind::Release(_, b) => {
                    frame.agenda.push(b);
                    frame.deferred.push(i);
                }
                Kind::Or(..) => frame.deferred.push(i),
                Kind::Eventually(_) | Kind::Until(..) => {
                    frame.fresh = true;
                    frame.deferred.push(i);
                }
            }
        }
        true
    }

    fn blocked(&self, i: usize, now: &FixedBitSet) -> bool {
        self.complement(i).is_some_and(|c| now.contains(c))
    }

    /// The two ways to satisfy an open choice point, preferred first. `None`
    /// when the member is already satisfied. The second way also asserts
    /// the negation of the first when that is a literal, so the two never
    /// describe the same valuation.
    fn options(&self, i: usize, now: &FixedBitSet) -> Option<(Vec<usize>, Option<Vec<usize>>)> {
        let unless = |lit: usize, mut rest: Vec<usize>| {
            rest.extend(self.complement(lit));
            rest
        };
        match self.kinds[i] {
            Kind::Or(a, b) => {
                if now.contains(a) || now.contains(b) {
                    None
                } else if self.blocked(a, now) {
                    Some((vec![b], None))
                } else if self.blocked(b, now) {
                    Some((vec![a], None))
                } else {
                    // The side with fewer pending promises first.
                    let (a, b) = if self.promises[b] < self.promises[a] { (b, a) } else { (a, b) };
                    Some((vec![a], Some(unless(a, vec![b]))))
                }
            }
            Kind::Eventually(a) => (!now.contains(a)).then(|| (vec![a], Some(unless(a, vec![])))),
            Kind::Until(a, b) => (!now.contains(b)).then(|| (vec![b], Some(unless(b, vec![a])))),
            Kind::Release(a, _) => (!now.contains(a)).then(|| (unless(a, vec![]), Some(vec![a]))),
            _ => unreachable!("not a choice point"),
        }
    }

    /// Whether [`Tableau::options`] leaves at most one way for member `i`.
    fn forced(&self, i: usize, now: &FixedBitSet) -> bool {
        match self.kinds[i] {
            Kind::Or(a, b) => {
                now.contains(a) || now.contains(b) || self.blocked(a, now) || self.blocked(b, now)
            }
            Kind::Eventually(a) | Kind::Until(_, a) | Kind::Release(a, _) => now.contains(a),
            _ => true,
        }
    }

    /// Which open choice point to decide next: one with at most one way
    /// left first, then eventualities, so fulfilment gets first claim on
    /// the literals it needs, then the most recent disjunction.
    fn next_choice(&self, frame: &mut Frame) -> Option<usize> {
        let forced = frame.deferred.iter().rposition(|&i| self.forced(i, &frame.now));
        let promise = || {
            frame.deferred.iter().rposition(|&i| matches!(self.kinds[i], Kind::Eventually(_) | Kind::Until(..)))
        };
        match forced.or_else(promise) {
            Some(k) => Some(frame.deferred.remove(k)),
            None => frame.deferred.pop(),
        }
    }

    /// Records every proposition left open as false, matching
    /// [`Tableau::valuation`], so states with the same valuation and
    /// obligations coincide.
    fn complete(&self, now: &mut FixedBitSet) {
        for lits in &self.literals {
            if let [Some(neg), pos] = *lits {
                if !pos.is_some_and(|p| now.contains(p)) {
                    now.insert(neg);
                }
            }
        }
    }
}

fn count_promises(kinds: &[Kind], i: usize, memo: &mut [usize]) -> usize {
    if memo[i] != usize::MAX {
        return memo[i];
    }
    let n = match kinds[i] {
        Kind::True | Kind::False | Kind::Lit(..) => 0,
        Kind::Next(a) | Kind::Globally(a) => count_promises(kinds, a, memo),
        Kind::Eventually(a) => 1 + count_promises(kinds, a, memo),
        Kind::And(a, b) | Kind::Or(a, b) | Kind::Release(a, b) => {
            count_promises(kinds, a, memo) + count_promises(kinds, b, memo)
        }
        Kind::Until(a, b) => 1 + count_promises(kinds, a, memo) + count_promises(kinds, b, memo),
    };
    memo[i] = n;
    n
}

#[derive(Clone)]
struct Frame {
    now: FixedBitSet,
    agenda: Vec<usize>,
    deferred: Vec<usize>,
    /// A `G` or eventuality member arrived since the last doom check.
    fresh: bool,
}

/// Expansion steps one doom check may spend on its targets.
const DOOM_FUEL: usize = 4096;

/// Memo of whether an eventuality target is consistent with a set of
/// invariants, keyed by the combined seed.
#[derive(Default)]
pub(crate) struct Targets {
    memo: HashMap<FixedBitSet, bool>,
    depth: usize,
    fuel: usize,
}

/// Lazily enumerates the states satisfying a seed set.
pub(crate) struct Expander {
    stack: Vec<Frame>,
}

impl Expander {
    pub(crate) fn new(tableau: &Tableau, seed: &FixedBitSet) -> Self {
        let frame = Frame {
            now: FixedBitSet::with_capacity(tableau.len()),
            agenda: seed.ones().rev().collect(),
            deferred: Vec::new(),
            fresh: false,
        };
        Expander { stack: vec![frame] }
    }

    /// With `targets`, branches that can only lead to doomed states are cut.
    pub(crate) fn next_state(
        &mut self,
        tableau: &Tableau,
        mut targets: Option<&mut Targets>,
        deadline: Option<Instant>,
    ) -> Result<Option<FixedBitSet>, Limit> {
        let mut steps = 0u32;
        'frames: while let Some(mut frame) = self.stack.pop() {
            if let Some(t) = targets.as_deref_mut().filter(|t| t.depth > 0) {
                if t.fuel == 0 {
                    return Err(Limit::States);
                }
                t.fuel -= 1;
            }
            steps = steps.wrapping_add(1);
            if steps.is_multiple_of(1024) && deadline.is_some_and(|d| Instant::now() > d) {
                self.stack.push(frame);
                return Err(Limit::Time);
            }
            loop {
                if !tableau.saturate(&mut frame) {
                    continue 'frames;
                }
                if let Some(targets) = targets.as_deref_mut().filter(|_| frame.fresh) {
                    frame.fresh = false;
                    if tableau.doomed(&frame.now, targets) {
                        continue 'frames;
                    }
                }
                let Some(i) = tableau.next_choice(&mut frame) else {
                    tableau.complete(&mut frame.now);
                    return Ok(Some(frame.now));
                };
                match tableau.options(i, &frame.now) {
                    None => {}
                    Some((first, second)) => {
                        if let Some(second) = second {
                            let mut alt = frame.clone();
                            alt.agenda.extend(second);
                            self.stack.push(alt);
                        }
                        frame.agenda.extend(first);
                    }
                }
            }
        }
        Ok(None)
    }
}
