//! LTL satisfiability over boolean propositions.
//!
//! The formula is put in negation normal form and explored as a tableau
//! graph built on the fly (see [`tableau`]); a lasso-shaped model is found
//! by an SCC search with one fairness set per eventuality (see [`search`]).
//! Before that, constants are folded and the query is split into groups of
//! conjuncts over disjoint propositions, each searched on its own.
//! Every model is re-checked with [`eval_on_lasso`] before it is returned.

mod search;
mod split;
mod tableau;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::abstraction::{build_abstraction, AbstractionError, AbstractionResult};
use crate::ltl::{eval_on_lasso, to_nnf, Formula, LassoTrace};
use crate::psp::{psp_to_ltl, RequirementSet};
use search::{Outcome, Search};
use split::{independent_groups, merge, simplify};
use tableau::Tableau;

pub const DEFAULT_MAX_STATES: usize = 1_000_000;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub max_states: usize,
    pub timeout: Duration,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_states: DEFAULT_MAX_STATES, timeout: DEFAULT_TIMEOUT }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    States,
    Time,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub states: usize,
    pub edges: usize,
    pub sccs: usize,
    #[serde(rename = "wall_time_ms", serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

impl EngineStats {
    pub fn absorb(&mut self, other: &EngineStats) {
        self.states += other.states;
        self.edges += other.edges;
        self.sccs += other.sccs;
        self.elapsed += other.elapsed;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("resource limit reached ({limit:?}) after {} states", stats.states)]
    ResourceLimit { limit: Limit, stats: EngineStats },
    #[error("formula still contains numerical constraint `{0}`")]
    NumericAtom(String),
    #[error("internal error: witness does not satisfy the formula")]
    WitnessRejected(LassoTrace),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatVerdict {
    pub satisfiable: bool,
    /// Present iff `satisfiable`.
    pub witness: Option<LassoTrace>,
    pub stats: EngineStats,
}

pub fn check_sat(formula: &Formula) -> Result<SatVerdict, EngineError> {
    check_sat_with(formula, &EngineConfig::default())
}

pub fn check_sat_with(formula: &Formula, config: &EngineConfig) -> Result<SatVerdict, EngineError> {
    let started = Instant::now();
    if let Some(atom) = formula.atoms().into_iter().find(|a| a.is_constraint()) {
        return Err(EngineError::NumericAtom(atom.to_string()));
    }
    let query = simplify(&to_nnf(formula));
    let mut stats = EngineStats::default();
    let mut lassos = Vec::new();
    for group in independent_groups(&query) {
        let budget = EngineConfig {
            max_states: config.max_states.saturating_sub(stats.states),
            timeout: config.timeout.saturating_sub(started.elapsed()),
        };
        let tableau = Tableau::new(&group);
        let mut search = Search::new(&tableau, &budget);
        let outcome = search.run();
        stats.absorb(&search.stats);
        stats.elapsed = started.elapsed();
        match outcome {
            Outcome::Empty => return Ok(SatVerdict { satisfiable: false, witness: None, stats }),
            Outcome::Limit(limit) => return Err(EngineError::ResourceLimit { limit, stats }),
            Outcome::Lasso(lasso) => lassos.push(lasso),
        }
    }
    let witness = merge(&lassos, &formula.symbol_names());
    stats.elapsed = started.elapsed();
    match eval_on_lasso(formula, &witness) {
        Ok(true) => Ok(SatVerdict { satisfiable: true, witness: Some(witness), stats }),
        _ => Err(EngineError::WitnessRejected(witness)),
    }
}

/// Per-requirement translations of a requirement set, prepared once and
/// queried for subsets.
#[derive(Debug, Clone)]
pub struct PreparedRequirements {
    entries: Vec<(String, Formula)>,
}

impl PreparedRequirements {
    pub fn new(requirements: &RequirementSet) -> Self {
        PreparedRequirements {
            entries: requirements.iter().map(|r| (r.id.clone(), psp_to_ltl(r))).collect(),
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(id, _)| id.as_str())
    }

    pub fn formula(&self, id: &str) -> Option<&Formula> {
        self.entries.iter().find(|(i, _)| i == id).map(|(_, f)| f)
    }

    /// Conjunction in input order of the requirements not in `excluded`.
    pub fn conjunction(&self, excluded: &BTreeSet<String>) -> Formula {
        Formula::conjunction(
            self.entries.iter().filter(|(id, _)| !excluded.contains(id)).map(|(_, f)| f.clone()),
        )
    }
}

/// Satisfiability of the requirements outside `excluded`, abstracted over
/// their own signature.
pub fn check_sat_incremental(
    base: &PreparedRequirements,
    excluded: &BTreeSet<String>,
    config: &EngineConfig,
) -> Result<(AbstractionResult, SatVerdict), EngineError> {
    let abstraction = build_abstraction(&base.conjunction(excluded))?;
    let verdict = check_sat_with(&abstraction.query(), config)?;
    Ok((abstraction, verdict))
}
