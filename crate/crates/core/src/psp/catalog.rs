//! Pattern × scope translation table.
//!
//! Payloads: `P` (pattern subject / trigger), `S`, `T` (response or cause
//! chain); scope delimiters `Q` (opening) and `R` (closing). Weak until is
//! expanded as `a W b = (a U b) | G a` so that translations only use
//! `X`, `F`, `G`, `U` and the boolean connectives. The full table is listed
//! in `docs/patterns.md` and frozen in `tests/golden/catalog.txt`.

use super::{Pattern, PspInstance, Requirement, RequirementSet, Scope};
use crate::ltl::Formula;

fn not(a: &Formula) -> Formula {
    a.clone().not()
}

fn and(a: Formula, b: Formula) -> Formula {
    a.and(b)
}

fn weak_until(a: Formula, b: Formula) -> Formula {
    a.clone().until(b).or(a.globally())
}

/// `Q & !R & F R`: a closed `Between` interval starts here.
fn opens_closed(q: &Formula, r: &Formula) -> Formula {
    and(and(q.clone(), not(r)), r.clone().eventually())
}

/// `Q & !R`: an `After ... until` interval starts here.
fn opens(q: &Formula, r: &Formula) -> Formula {
    and(q.clone(), not(r))
}

/// `G(!Q) | (!Q U (Q & body))`: `body` holds from the first `Q`, if any.
fn after_first(q: &Formula, body: Formula) -> Formula {
    not(q).globally().or(not(q).until(and(q.clone(), body)))
}

/// At most `k` maximal `P` blocks, forever.
fn bounded_forever(p: &Formula, k: u32) -> Formula {
    let mut inner = not(p).globally();
    for _ in 0..k {
        inner = weak_until(not(p), weak_until(p.clone(), inner));
    }
    inner
}

/// At most `k` maximal `P` blocks before the next `R`. With `weak` the
/// closing `R` need not occur.
fn bounded_until(p: &Formula, r: &Formula, k: u32, weak: bool) -> Formula {
    let until = |a: Formula, b: Formula| if weak { weak_until(a, b) } else { a.until(b) };
    let mut inner = until(not(p), r.clone());
    for _ in 0..k {
        let p_block = until(and(p.clone(), not(r)), r.clone().or(inner));
        inner = until(and(not(p), not(r)), r.clone().or(p_block));
    }
    inner
}

/// Every `P` before the next `R` is answered by `S` (then `T`) before `R`.
fn response_before(p: &Formula, s: &Formula, t: Option<&Formula>, r: &Formula) -> Formula {
    let answer = match t {
        None => and(s.clone(), not(r)),
        Some(t) => and(
            and(s.clone(), not(r)),
            not(r).until(and(t.clone(), not(r))).next(),
        ),
    };
    p.clone().implies(not(r).until(answer))
}

/// `S & !P & X(!P U T)`: the `S`-then-`T` sequence before `P`.
fn chain_before(p: &Formula, s: &Formula, t: &Formula) -> Formula {
    and(and(s.clone(), not(p)), not(p).until(t.clone()).next())
}

/// Translates a parsed pattern instance to LTL with constraint atoms.
pub fn psp_to_ltl(requirement: &Requirement) -> Formula {
    translate(&requirement.psp)
}

pub(crate) fn translate(psp: &PspInstance) -> Formula {
    use Pattern::*;
    use Scope::*;

    match (&psp.pattern, &psp.scope) {
        (Absence(p), Globally) => not(p).globally(),
        (Absence(p), Before(r)) => r.clone().eventually().implies(not(p).until(r.clone())),
        (Absence(p), After(q)) => q.clone().implies(not(p).globally()).globally(),
        (Absence(p), Between(q, r)) => opens_closed(q, r).implies(not(p).until(r.clone())).globally(),
        (Absence(p), AfterUntil(q, r)) => opens(q, r).implies(weak_until(not(p), r.clone())).globally(),

        (Existence(p), Globally) => p.clone().eventually(),
        (Existence(p), Before(r)) => weak_until(not(r), and(p.clone(), not(r))),
        (Existence(p), After(q)) => not(q).globally().or(and(q.clone(), p.clone().eventually()).eventually()),
        (Existence(p), Between(q, r)) => {
            opens(q, r).implies(weak_until(not(r), and(p.clone(), not(r)))).globally()
        }
        (Existence(p), AfterUntil(q, r)) => {
            opens(q, r).implies(not(r).until(and(p.clone(), not(r)))).globally()
        }

        (Universality(p), Globally) => p.clone().globally(),
        (Universality(p), Before(r)) => r.clone().eventually().implies(p.clone().until(r.clone())),
        (Universality(p), After(q)) => q.clone().implies(p.clone().globally()).globally(),
        (Universality(p), Between(q, r)) => opens_closed(q, r).implies(p.clone().until(r.clone())).globally(),
        (Universality(p), AfterUntil(q, r)) => opens(q, r).implies(weak_until(p.clone(), r.clone())).globally(),

        (BoundedExistence { payload: p, bound }, scope) => {
            let k = *bound;
            match scope {
                Globally => bounded_forever(p, k),
                Before(r) => r.clone().eventually().implies(bounded_until(p, r, k, false)),
                After(q) => q.clone().eventually().implies(not(q).until(and(q.clone(), bounded_forever(p, k)))),
                Between(q, r) => opens_closed(q, r).implies(bounded_until(p, r, k, false)).globally(),
                AfterUntil(q, r) => opens(q, r).implies(bounded_until(p, r, k, true)).globally(),
            }
        }

        (Precedence { trigger: p, cause: s }, Globally) => weak_until(not(p), s.clone()),
        (Precedence { trigger: p, cause: s }, Before(r)) => {
            r.clone().eventually().implies(not(p).until(s.clone().or(r.clone())))
        }
        (Precedence { trigger: p, cause: s }, After(q)) => after_first(q, weak_until(not(p), s.clone())),
        (Precedence { trigger: p, cause: s }, Between(q, r)) => {
            opens_closed(q, r).implies(not(p).until(s.clone().or(r.clone()))).globally()
        }
        (Precedence { trigger: p, cause: s }, AfterUntil(q, r)) => {
            opens(q, r).implies(weak_until(not(p), s.clone().or(r.clone()))).globally()
        }

        (Response { trigger: p, response: s }, Globally) => p.clone().implies(s.clone().eventually()).globally(),
        (Response { trigger: p, response: s }, Before(r)) => {
            r.clone().eventually().implies(response_before(p, s, None, r).until(r.clone()))
        }
        (Response { trigger: p, response: s }, After(q)) => {
            q.clone().implies(p.clone().implies(s.clone().eventually()).globally()).globally()
        }
        (Response { trigger: p, response: s }, Between(q, r)) => {
            opens_closed(q, r).implies(response_before(p, s, None, r).until(r.clone())).globally()
        }
        (Response { trigger: p, response: s }, AfterUntil(q, r)) => {
            opens(q, r).implies(weak_until(response_before(p, s, None, r), r.clone())).globally()
        }

        (ResponseChain { trigger: p, first: s, second: t }, scope) => {
            let unbounded = || p.clone().implies(and(s.clone(), t.clone().eventually().next()).eventually()).globally();
            match scope {
                Globally => unbounded(),
                Before(r) => r.clone().eventually().implies(response_before(p, s, Some(t), r).until(r.clone())),
                After(q) => q.clone().implies(unbounded()).globally(),
                Between(q, r) => {
                    opens_closed(q, r).implies(response_before(p, s, Some(t), r).until(r.clone())).globally()
                }
                AfterUntil(q, r) => {
                    opens(q, r).implies(weak_until(response_before(p, s, Some(t), r), r.clone())).globally()
                }
            }
        }

        (PrecedenceChain { trigger: p, first: s, second: t }, scope) => {
            let seq = chain_before(p, s, t);
            match scope {
                Globally => p.clone().eventually().implies(not(p).until(seq)),
                Before(r) => r.clone().eventually().implies(not(p).until(r.clone().or(seq))),
                After(q) => after_first(q, p.clone().eventually().implies(not(p).until(seq))),
                Between(q, r) => opens_closed(q, r).implies(not(p).until(r.clone().or(seq))).globally(),
                AfterUntil(q, r) => opens(q, r)
                    .implies(p.clone().eventually().implies(not(p).until(r.clone().or(seq))))
                    .globally(),
            }
        }
    }
}

/// `φ_1 ∧ … ∧ φ_n` in input order; `true` for an empty set.
pub fn conjoin(requirements: &RequirementSet) -> Formula {
    Formula::conjunction(requirements.iter().map(psp_to_ltl))
}
