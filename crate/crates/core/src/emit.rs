//! Serialization of an abstracted problem for external tools.
//!
//! SMV output is a universal model over one boolean per proposition with a
//! single negated specification: a counterexample produced by the model
//! checker is a trace satisfying `q_m & phi_prime`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use thiserror::Error;

use crate::abstraction::AbstractionResult;
use crate::ltl::{parse_formula, render, Dialect, Formula, SyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitTarget {
    Smv,
    NeutralLtl,
}

pub fn emit(problem: &AbstractionResult, target: EmitTarget) -> String {
    match target {
        EmitTarget::Smv => emit_smv(problem),
        EmitTarget::NeutralLtl => emit_neutral(problem),
    }
}

/// Words NuSMV does not accept as variable names (operator letters and
/// `true`/`false` are already rejected by the front end).
const SMV_KEYWORDS: &[&str] = &[
    "MODULE", "DEFINE", "MDEFINE", "CONSTANTS", "VAR", "IVAR", "FROZENVAR", "INIT", "TRANS", "INVAR", "SPEC",
    "CTLSPEC", "LTLSPEC", "PSLSPEC", "COMPUTE", "NAME", "INVARSPEC", "FAIRNESS", "JUSTICE", "COMPASSION", "ISA",
    "ASSIGN", "CONSTRAINT", "SIMPWFF", "CTLWFF", "LTLWFF", "PSLWFF", "COMPWFF", "IN", "MIN", "MAX", "MIRROR", "PRED",
    "PREDICATES", "process", "array", "of", "boolean", "integer", "real", "word", "word1", "bool", "signed",
    "unsigned", "extend", "resize", "sizeof", "uwconst", "swconst", "EX", "AX", "EF", "AF", "EG", "AG", "E", "F",
    "O", "G", "H", "X", "Y", "Z", "A", "U", "S", "V", "T", "BU", "EBF", "ABF", "EBG", "ABG", "case", "esac", "mod",
    "next", "init", "union", "in", "xor", "xnor", "self", "TRUE", "FALSE", "count", "abs", "max", "min",
];

/// The formula placed under `LTLSPEC !(…)`. Without numerical variables
/// `q_m` is `G(true)` and is left out.
pub fn smv_spec_formula(problem: &AbstractionResult) -> Formula {
    if problem.map.is_empty() {
        problem.phi_prime.clone()
    } else {
        problem.query()
    }
}

pub fn emit_smv(problem: &AbstractionResult) -> String {
    let spec = smv_spec_formula(problem);
    let names: Vec<&str> = spec.symbol_names();
    let taken: HashSet<&str> = names.iter().copied().collect();
    let mut renamed: BTreeMap<String, String> = BTreeMap::new();
    for name in &names {
        if SMV_KEYWORDS.contains(name) {
            let mut fresh = format!("{name}_");
            while taken.contains(fresh.as_str()) || renamed.values().any(|v| *v == fresh) {
                fresh.push('_');
            }
            renamed.insert(name.to_string(), fresh);
        }
    }
    let spec = if renamed.is_empty() {
        spec
    } else {
        spec.map_atoms(&mut |a| match renamed.get(a.name()) {
            Some(new) => Formula::prop(new.as_str()),
            None => Formula::atom(a.clone()),
        })
    };

    let mut out = String::from("MODULE main\n");
    for (old, new) in &renamed {
        writeln!(out, "-- {old} is declared as {new}").unwrap();
    }
    let declared = spec.symbol_names();
    if !declared.is_empty() {
        out.push_str("VAR\n");
        for name in declared {
            writeln!(out, "  {name} : boolean;").unwrap();
        }
    }
    writeln!(out, "LTLSPEC !({})", render(&spec, Dialect::Smv)).unwrap();
    out
}

/// `q_m` on the first line and `phi_prime` on the second.
pub fn emit_neutral(problem: &AbstractionResult) -> String {
    format!("{}\n{}\n", problem.q_m, problem.phi_prime)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NeutralError {
    #[error("line {line}: {source}")]
    Syntax { line: usize, source: SyntaxError },
    #[error("expected 2 formulas (q_m and phi_prime), found {0}")]
    FormulaCount(usize),
}

/// Reads back the output of [`emit_neutral`]. Blank lines and lines
/// starting with `#` are ignored.
pub fn parse_neutral_problem(text: &str) -> Result<(Formula, Formula), NeutralError> {
    let mut formulas = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        formulas.push(parse_formula(trimmed).map_err(|source| NeutralError::Syntax { line: i + 1, source })?);
    }
    match <[Formula; 2]>::try_from(formulas) {
        Ok([q_m, phi_prime]) => Ok((q_m, phi_prime)),
        Err(v) => Err(NeutralError::FormulaCount(v.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::build_abstraction;
    use crate::psp::{conjoin, parse_requirements};

    fn example() -> AbstractionResult {
        let set = parse_requirements(
            "R1: Globally, it is always the case that if proximity_sensor < 20 holds, then arm_idle eventually holds.",
        )
        .unwrap();
        build_abstraction(&conjoin(&set)).unwrap()
    }

    #[test]
    fn single_proposition_smv() {
        let problem = build_abstraction(&Formula::prop("p").globally()).unwrap();
        assert_eq!(emit_smv(&problem), "MODULE main\nVAR\n  p : boolean;\nLTLSPEC !(G p)\n");
    }

    #[test]
    fn example_smv_declares_regions_and_negates_the_query() {
        let problem = example();
        let text = emit_smv(&problem);
        for name in ["arm_idle", "__proximity_sensor__r0", "__proximity_sensor__r1", "__proximity_sensor__r2"] {
            assert!(text.contains(&format!("  {name} : boolean;\n")), "{text}");
        }
        let body = text.lines().last().unwrap().strip_prefix("LTLSPEC ").unwrap();
        assert_eq!(parse_formula(body).unwrap(), problem.query().not());
        assert!(text.is_ascii());
    }

    #[test]
    fn keywords_are_renamed_for_smv() {
        let f = Formula::prop("next").and(Formula::prop("next_").eventually());
        let text = emit_smv(&build_abstraction(&f).unwrap());
        assert!(text.contains("-- next is declared as next__\n"), "{text}");
        assert!(text.contains("LTLSPEC !(next__ & F next_)"), "{text}");
    }

    #[test]
    fn neutral_round_trip() {
        let problem = build_abstraction(&Formula::prop("q").eventually()).unwrap();
        assert_eq!(emit_neutral(&problem), "G(true)\nF q\n");
        let problem = example();
        let (q_m, phi_prime) = parse_neutral_problem(&emit_neutral(&problem)).unwrap();
        assert_eq!((q_m, phi_prime), (problem.q_m, problem.phi_prime));
    }

    #[test]
    fn neutral_reader_reports_problems() {
        assert_eq!(parse_neutral_problem("# only\nG p\n"), Err(NeutralError::FormulaCount(1)));
        assert!(matches!(parse_neutral_problem("G p\nF (\n"), Err(NeutralError::Syntax { line: 2, .. })));
    }
}
