//! Deletion-based minimal inconsistent subset.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{check_subset, AnalysisError, Verdict};
use crate::engine::{EngineConfig, EngineStats, Limit, PreparedRequirements};
use crate::psp::RequirementSet;

/// A minimal (not necessarily minimum-cardinality) inconsistent subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mus {
    pub ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MusOutcome {
    Found(Mus),
    /// The whole set is consistent; nothing to explain.
    Consistent,
    /// A check hit a resource limit. `remaining` is the working set at
    /// that point: inconsistent, but possibly not minimal.
    Indeterminate { remaining: Vec<String>, limit: Limit },
}

#[derive(Debug, Clone)]
pub struct MusResult {
    pub outcome: MusOutcome,
    pub stats: EngineStats,
    pub checks: usize,
}

/// Drops each requirement in file order when the rest stays inconsistent.
pub fn explain_inconsistency(requirements: &RequirementSet, config: &EngineConfig) -> Result<MusResult, AnalysisError> {
    let prepared = PreparedRequirements::new(requirements);
    let all: Vec<String> = requirements.ids().into_iter().map(str::to_string).collect();
    let mut stats = EngineStats::default();
    let mut checks = 0;
    let mut check = |excluded: &BTreeSet<String>, stats: &mut EngineStats| {
        checks += 1;
        let c = check_subset(&prepared, excluded, config)?;
        stats.absorb(&c.stats);
        Ok::<_, AnalysisError>((c.verdict, c.limit))
    };

    let mut excluded = BTreeSet::new();
    match check(&excluded, &mut stats)? {
        (Verdict::Consistent, _) => return Ok(MusResult { outcome: MusOutcome::Consistent, stats, checks: 1 }),
        (Verdict::Indeterminate, limit) => {
            let outcome = MusOutcome::Indeterminate { remaining: all, limit: limit.expect("limit") };
            return Ok(MusResult { outcome, stats, checks: 1 });
        }
        (Verdict::Inconsistent, _) => {}
    }

    for id in &all {
        excluded.insert(id.clone());
        match check(&excluded, &mut stats)? {
            (Verdict::Inconsistent, _) => {}
            (Verdict::Consistent, _) => {
                excluded.remove(id);
            }
            (Verdict::Indeterminate, limit) => {
                excluded.remove(id);
                let remaining = all.iter().filter(|i| !excluded.contains(*i)).cloned().collect();
                let outcome = MusOutcome::Indeterminate { remaining, limit: limit.expect("limit") };
                return Ok(MusResult { outcome, stats, checks });
            }
        }
    }
    let ids: Vec<String> = all.iter().filter(|i| !excluded.contains(*i)).cloned().collect();

    if cfg!(debug_assertions) {
        for id in &ids {
            excluded.insert(id.clone());
            let (verdict, _) = check(&excluded, &mut stats)?;
            assert_ne!(verdict, Verdict::Inconsistent, "subset without `{id}` is still inconsistent");
            excluded.remove(id);
        }
    }

    Ok(MusResult { outcome: MusOutcome::Found(Mus { ids }), stats, checks })
}
