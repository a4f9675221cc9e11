mod common;

use std::collections::BTreeSet;

use common::{boolean_oracle_sat, prop_leaves, random_formula, PROPS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reqlint_core::engine::{check_sat, check_sat_incremental, EngineConfig, PreparedRequirements};
use reqlint_core::ltl::{eval_on_lasso, to_nnf, Formula};
use reqlint_core::psp::{parse_requirements, RequirementSet};

fn formulas(seed: u64, count: usize) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = prop_leaves(&PROPS);
    (0..count)
        .map(|_| {
            let size = rng.random_range(1..=8);
            random_formula(&mut rng, &leaves, size)
        })
        .collect()
}

#[test]
fn verdicts_agree_with_bounded_enumeration() {
    let mut unsat = 0;
    for f in formulas(11, 600) {
        let verdict = check_sat(&to_nnf(&f)).unwrap();
        if verdict.satisfiable {
            assert!(eval_on_lasso(&f, verdict.witness.as_ref().unwrap()).unwrap(), "{f}");
        } else {
            unsat += 1;
            assert!(!boolean_oracle_sat(&f, 5), "engine says UNSAT but a short lasso satisfies {f}");
        }
    }
    assert!(unsat > 20, "only {unsat} unsatisfiable samples");
}

#[test]
fn short_models_are_always_found() {
    // Every formula the bounded oracle can satisfy must be reported SAT.
    for f in formulas(12, 600) {
        if boolean_oracle_sat(&f, 4) {
            assert!(check_sat(&f).unwrap().satisfiable, "{f}");
        }
    }
}

#[test]
fn a_formula_or_its_negation_is_satisfiable() {
    for f in formulas(13, 400) {
        let pos = check_sat(&f).unwrap().satisfiable;
        let neg = check_sat(&to_nnf(&f.clone().not())).unwrap().satisfiable;
        assert!(pos || neg, "{f}");
    }
}

#[test]
fn subsets_of_satisfiable_conjunctions_are_satisfiable() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let pool = formulas(15, 300);
    for _ in 0..150 {
        let n = rng.random_range(2..=4);
        let members: Vec<Formula> = (0..n).map(|_| pool[rng.random_range(0..pool.len())].clone()).collect();
        if check_sat(&Formula::conjunction(members.iter().cloned())).unwrap().satisfiable {
            for skip in 0..n {
                let rest = members.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, f)| f.clone());
                assert!(check_sat(&Formula::conjunction(rest)).unwrap().satisfiable);
            }
        }
    }
}

const SENTENCES: &[&str] = &[
    "Globally, it is always the case that a holds.",
    "Globally, it is never the case that a holds.",
    "Globally, a eventually holds.",
    "Globally, it is always the case that if a holds, then b eventually holds.",
    "Globally, it is never the case that b holds.",
    "After a, it is always the case that c holds.",
    "Before c, b eventually holds.",
    "Globally, it is always the case that if b holds, then c previously held.",
    "Globally, it is never the case that c holds.",
    "Globally, it is always the case that x < 5 holds.",
    "Globally, x = 5 eventually holds.",
    "Globally, it is never the case that x > 7 holds.",
    "Between a and b, x >= 7 eventually holds.",
    "Globally, transitions to states in which a holds occur at most 1 times.",
];

fn random_set(rng: &mut ChaCha8Rng) -> RequirementSet {
    let n = rng.random_range(1..=6);
    let text: String = (0..n).map(|i| format!("R{i}: {}\n", SENTENCES[rng.random_range(0..SENTENCES.len())])).collect();
    parse_requirements(&text).unwrap()
}

#[test]
fn incremental_checks_match_fresh_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let config = EngineConfig::default();
    for _ in 0..200 {
        let set = random_set(&mut rng);
        let prepared = PreparedRequirements::new(&set);
        let excluded: BTreeSet<String> =
            set.ids().into_iter().filter(|_| rng.random_bool(0.3)).map(str::to_string).collect();
        let (_, incremental) = check_sat_incremental(&prepared, &excluded, &config).unwrap();
        let kept: String = set
            .iter()
            .filter(|r| !excluded.contains(&r.id))
            .map(|r| format!("{}: {}\n", r.id, r.source_text))
            .collect();
        let fresh_set = parse_requirements(&kept).unwrap();
        let fresh = PreparedRequirements::new(&fresh_set);
        let (_, direct) = check_sat_incremental(&fresh, &BTreeSet::new(), &config).unwrap();
        assert_eq!(incremental.satisfiable, direct.satisfiable, "{kept}");
    }
}
