//! Cross-checks every scope × pattern translation against a direct,
//! position-based reading of the pattern's English meaning, on random
//! ultimately periodic traces over the signals p, s, t, q, r.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reqlint_core::ltl::{eval_on_lasso, Formula, LassoTrace, State};
use reqlint_core::psp::{parse_sentence, Pattern, PspInstance, Requirement, Scope};

const SIGNALS: [&str; 5] = ["p", "s", "t", "q", "r"];

/// Positional view of `prefix · loop^ω`.
struct Word<'a> {
    trace: &'a LassoTrace,
    prefix: usize,
    period: usize,
}

impl<'a> Word<'a> {
    fn new(trace: &'a LassoTrace) -> Self {
        Word { trace, prefix: trace.prefix.len(), period: trace.cycle.len() }
    }

    fn holds(&self, signal: &str, pos: usize) -> bool {
        self.trace.state(pos)[signal]
    }

    /// Positions at or after `from` that represent every distinct suffix.
    fn horizon(&self, from: usize) -> usize {
        from.max(self.prefix) + self.period
    }

    fn first(&self, signal: &str, from: usize) -> Option<usize> {
        (from..self.horizon(from)).find(|&j| self.holds(signal, j))
    }

    /// `[from, end)`, or every representative position from `from` on.
    fn span(&self, from: usize, end: Option<usize>) -> std::ops::Range<usize> {
        from..end.unwrap_or_else(|| self.horizon(from))
    }

    fn exists(&self, signal: &str, from: usize, end: Option<usize>) -> bool {
        self.span(from, end).any(|j| self.holds(signal, j))
    }

    fn all(&self, signal: &str, from: usize, end: Option<usize>) -> bool {
        self.span(from, end).all(|j| self.holds(signal, j))
    }
}

/// Scope intervals `[start, end)`; `end = None` is unbounded.
fn intervals(w: &Word, scope: &str) -> Vec<(usize, Option<usize>)> {
    let starts = |w: &Word| -> Vec<usize> {
        (0..w.prefix + w.period).filter(|&i| w.holds("q", i) && !w.holds("r", i)).collect()
    };
    match scope {
        "Globally" => vec![(0, None)],
        "Before" => w.first("r", 0).map(|e| vec![(0, Some(e))]).unwrap_or_default(),
        "After" => w.first("q", 0).map(|s| vec![(s, None)]).unwrap_or_default(),
        "Between" => starts(w)
            .into_iter()
            .filter_map(|s| w.first("r", s).map(|e| (s, Some(e))))
            .collect(),
        "AfterUntil" => starts(w).into_iter().map(|s| (s, w.first("r", s))).collect(),
        other => panic!("unknown scope {other}"),
    }
}

fn blocks(w: &Word, from: usize, end: Option<usize>) -> Option<usize> {
    let range = match end {
        Some(e) => from..e,
        None => {
            let tail = w.horizon(from) - w.period;
            let looped = (tail..tail + w.period).map(|j| w.holds("p", j));
            let values: Vec<bool> = looped.collect();
            if values.iter().any(|v| *v) && values.iter().any(|v| !*v) {
                return None;
            }
            from..tail + w.period
        }
    };
    Some(range.clone().filter(|&j| w.holds("p", j) && (j == from || !w.holds("p", j - 1))).count())
}

fn pattern_holds(w: &Word, pattern: &str, bound: usize, (s, e): (usize, Option<usize>)) -> bool {
    match pattern {
        "Universality" => w.all("p", s, e),
        "Absence" => !w.exists("p", s, e),
        "Existence" => w.exists("p", s, e),
        "BoundedExistence" => blocks(w, s, e).is_some_and(|n| n <= bound),
        "Precedence" => match w.span(s, e).find(|&j| w.holds("p", j)) {
            None => true,
            Some(j) => w.exists("s", s, Some(j + 1)),
        },
        "Response" => w
            .span(s, e)
            .filter(|&j| w.holds("p", j))
            .all(|j| w.exists("s", j, e)),
        "ResponseChain" => w.span(s, e).filter(|&j| w.holds("p", j)).all(|j| {
            w.span(j, e).any(|m| w.holds("s", m) && w.exists("t", m + 1, e))
        }),
        "PrecedenceChain" => match w.span(s, e).find(|&j| w.holds("p", j)) {
            None => true,
            Some(j) => (s..j).any(|m| w.holds("s", m) && w.exists("t", m + 1, Some(j + 1))),
        },
        other => panic!("unknown pattern {other}"),
    }
}

fn oracle(trace: &LassoTrace, scope: &str, pattern: &str, bound: usize) -> bool {
    let w = Word::new(trace);
    intervals(&w, scope).into_iter().all(|iv| pattern_holds(&w, pattern, bound, iv))
}

fn sentence(scope: &str, pattern: &str, bound: usize) -> String {
    let scope = match scope {
        "Globally" => "Globally".to_string(),
        "Before" => "Before r".into(),
        "After" => "After q".into(),
        "Between" => "Between q and r".into(),
        "AfterUntil" => "After q until r".into(),
        _ => unreachable!(),
    };
    let body = match pattern {
        "Universality" => "it is always the case that p holds".to_string(),
        "Absence" => "it is never the case that p holds".into(),
        "Existence" => "p eventually holds".into(),
        "BoundedExistence" => format!("transitions to states in which p holds occur at most {bound} times"),
        "Precedence" => "it is always the case that if p holds, then s previously held".into(),
        "Response" => "it is always the case that if p holds, then s eventually holds".into(),
        "ResponseChain" => {
            "it is always the case that if p holds, then s eventually holds and is succeeded by t".into()
        }
        "PrecedenceChain" => {
            "it is always the case that if p holds, then s previously held and was followed by t".into()
        }
        _ => unreachable!(),
    };
    format!("{scope}, {body}.")
}

fn random_state(rng: &mut ChaCha8Rng) -> State {
    SIGNALS.iter().map(|s| (s.to_string(), rng.random_bool(0.4))).collect()
}

fn random_lasso(rng: &mut ChaCha8Rng) -> LassoTrace {
    let prefix = (0..rng.random_range(0..=4)).map(|_| random_state(rng)).collect();
    let cycle = (0..rng.random_range(1..=4)).map(|_| random_state(rng)).collect();
    LassoTrace::new(prefix, cycle).unwrap()
}

fn translate(text: &str) -> Formula {
    let psp: PspInstance = parse_sentence(text).unwrap();
    reqlint_core::psp::psp_to_ltl(&Requirement { id: "r".into(), source_text: text.into(), psp })
}

const SCOPES: [&str; 5] = ["Globally", "Before", "After", "Between", "AfterUntil"];
const PATTERNS: [&str; 8] = [
    "Universality",
    "Absence",
    "Existence",
    "BoundedExistence",
    "Precedence",
    "Response",
    "ResponseChain",
    "PrecedenceChain",
];

#[test]
fn every_translation_agrees_with_pattern_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let traces: Vec<LassoTrace> = (0..1500).map(|_| random_lasso(&mut rng)).collect();
    let mut failures = Vec::new();
    for scope in SCOPES {
        for pattern in PATTERNS {
            let bounds: &[usize] = if pattern == "BoundedExistence" { &[1, 2, 3] } else { &[0] };
            for &bound in bounds {
                let formula = translate(&sentence(scope, pattern, bound));
                let mismatches = traces
                    .iter()
                    .filter(|t| eval_on_lasso(&formula, t).unwrap() != oracle(t, scope, pattern, bound))
                    .count();
                if mismatches > 0 {
                    failures.push(format!("{scope}/{pattern}(k={bound}): {mismatches} mismatches; {formula}"));
                }
            }
        }
    }
    assert!(failures.is_empty(), "\n{}", failures.join("\n"));
}

#[test]
fn existence_before_on_hand_built_traces() {
    let formula = translate("Before r, p eventually holds.");
    let st = |p: bool, r: bool| -> State {
        SIGNALS.iter().map(|s| (s.to_string(), (*s == "p" && p) || (*s == "r" && r))).collect()
    };
    let cases = [
        // R never occurs: nothing required.
        (vec![], vec![st(false, false)], true),
        // P before R.
        (vec![st(false, false), st(true, false)], vec![st(false, true)], true),
        // R first.
        (vec![st(false, true), st(true, false)], vec![st(false, false)], false),
        // P together with R does not count.
        (vec![st(true, true)], vec![st(false, false)], false),
    ];
    for (prefix, cycle, expected) in cases {
        let trace = LassoTrace::new(prefix, cycle).unwrap();
        assert_eq!(eval_on_lasso(&formula, &trace).unwrap(), expected, "{trace:?}");
        assert_eq!(oracle(&trace, "Before", "Existence", 0), expected);
    }
}

#[test]
fn payload_kinds_match_sentences() {
    for scope in SCOPES {
        for pattern in PATTERNS {
            let psp = parse_sentence(&sentence(scope, pattern, 2)).unwrap();
            assert_eq!(psp.pattern.kind(), pattern);
            assert_eq!(psp.scope.kind(), scope);
            assert!(matches!(psp.scope, Scope::Globally) || scope != "Globally");
            if let Pattern::BoundedExistence { bound, .. } = psp.pattern {
                assert_eq!(bound, 2);
            }
        }
    }
}
