//! Requirement-set analyses: consistency, minimal inconsistent subsets,
//! trigger vacuity and variable connectivity.

mod connectivity;
mod mus;
mod vacuity;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::abstraction::{concretize_witness, AbstractionError, AbstractionResult};
use crate::engine::{check_sat_incremental, EngineConfig, EngineError, EngineStats, Limit, PreparedRequirements};
use crate::ltl::{LassoTrace, ValuedLasso};
use crate::psp::RequirementSet;

pub use connectivity::{check_connectivity, Component, Connectivity, DependencyGraph};
pub use mus::{explain_inconsistency, Mus, MusOutcome, MusResult};
pub use vacuity::{check_vacuity, VacuityFinding, VacuityReport, VacuityStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
    #[error(transparent)]
    Engine(EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Inconsistent => "INCONSISTENT",
            Verdict::Indeterminate => "INDETERMINATE",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Consistency {
    pub verdict: Verdict,
    /// Witness over propositions and region propositions.
    pub witness: Option<LassoTrace>,
    /// The same witness with a value for every numerical variable.
    pub concrete_witness: Option<ValuedLasso>,
    pub abstraction: AbstractionResult,
    pub stats: EngineStats,
    /// Set when the verdict is [`Verdict::Indeterminate`].
    pub limit: Option<Limit>,
}

/// One satisfiability check of the requirements outside `excluded`, with
/// resource limits turned into [`Verdict::Indeterminate`].
pub(crate) fn check_subset(
    prepared: &PreparedRequirements,
    excluded: &BTreeSet<String>,
    config: &EngineConfig,
) -> Result<Consistency, AnalysisError> {
    match check_sat_incremental(prepared, excluded, config) {
        Ok((abstraction, verdict)) => {
            let concrete_witness = match &verdict.witness {
                Some(w) => Some(concretize_witness(w, &abstraction.map)?),
                None => None,
            };
            Ok(Consistency {
                verdict: if verdict.satisfiable { Verdict::Consistent } else { Verdict::Inconsistent },
                witness: verdict.witness,
                concrete_witness,
                abstraction,
                stats: verdict.stats,
                limit: None,
            })
        }
        Err(EngineError::ResourceLimit { limit, stats }) => {
            let abstraction = crate::abstraction::build_abstraction(&prepared.conjunction(excluded))?;
            Ok(Consistency {
                verdict: Verdict::Indeterminate,
                witness: None,
                concrete_witness: None,
                abstraction,
                stats,
                limit: Some(limit),
            })
        }
        Err(EngineError::Abstraction(e)) => Err(AnalysisError::Abstraction(e)),
        Err(e) => Err(AnalysisError::Engine(e)),
    }
}

/// Decides whether all requirements can hold together. The empty set is
/// consistent.
pub fn check_consistency(requirements: &RequirementSet, config: &EngineConfig) -> Result<Consistency, AnalysisError> {
    check_subset(&PreparedRequirements::new(requirements), &BTreeSet::new(), config)
}
