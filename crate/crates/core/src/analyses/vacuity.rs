//! Trigger vacuity: a requirement with a trigger holds vacuously when the
//! whole specification forbids the trigger from ever occurring.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{check_subset, AnalysisError, Consistency, Verdict};
use crate::abstraction::concretize_witness;
use crate::engine::{check_sat_with, EngineConfig, EngineError, EngineStats, Limit, PreparedRequirements};
use crate::ltl::{eval_on_lasso, ValuedLasso};
use crate::psp::RequirementSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VacuityStatus {
    Vacuous,
    NonVacuous,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VacuityFinding {
    pub id: String,
    /// The trigger as written in the requirement, in LTL syntax.
    pub trigger: String,
    pub status: VacuityStatus,
    /// A trace of the specification on which the trigger occurs.
    pub witness: Option<ValuedLasso>,
    pub limit: Option<Limit>,
}

impl VacuityFinding {
    pub fn vacuous(&self) -> bool {
        self.status == VacuityStatus::Vacuous
    }
}

#[derive(Debug, Clone)]
pub struct VacuityReport {
    pub consistency: Consistency,
    /// Empty unless the specification is consistent.
    pub findings: Vec<VacuityFinding>,
    pub stats: EngineStats,
}

/// Checks every requirement whose pattern has a trigger (response,
/// precedence and their chains).
pub fn check_vacuity(requirements: &RequirementSet, config: &EngineConfig) -> Result<VacuityReport, AnalysisError> {
    let prepared = PreparedRequirements::new(requirements);
    let consistency = check_subset(&prepared, &BTreeSet::new(), config)?;
    let mut stats = consistency.stats.clone();
    let mut findings = Vec::new();
    if consistency.verdict != Verdict::Consistent {
        return Ok(VacuityReport { consistency, findings, stats });
    }
    let abstraction = &consistency.abstraction;
    let query = abstraction.query();
    for requirement in requirements {
        let Some(trigger) = requirement.psp.trigger() else {
            continue;
        };
        let reachable = abstraction.abstract_formula(trigger).eventually();
        let mut finding = VacuityFinding {
            id: requirement.id.clone(),
            trigger: trigger.to_string(),
            status: VacuityStatus::NonVacuous,
            witness: None,
            limit: None,
        };
        let existing = consistency.witness.as_ref().expect("consistent verdict has a witness");
        if eval_on_lasso(&reachable, existing).unwrap_or(false) {
            finding.witness = consistency.concrete_witness.clone();
        } else {
            match check_sat_with(&query.clone().and(reachable), config) {
                Ok(verdict) => {
                    stats.absorb(&verdict.stats);
                    match verdict.witness {
                        Some(w) => finding.witness = Some(concretize_witness(&w, &abstraction.map)?),
                        None => finding.status = VacuityStatus::Vacuous,
                    }
                }
                Err(EngineError::ResourceLimit { limit, stats: s }) => {
                    stats.absorb(&s);
                    finding.status = VacuityStatus::Indeterminate;
                    finding.limit = Some(limit);
                }
                Err(e) => return Err(AnalysisError::Engine(e)),
            }
        }
        findings.push(finding);
    }
    Ok(VacuityReport { consistency, findings, stats })
}
