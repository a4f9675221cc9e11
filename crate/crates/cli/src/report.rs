//! The JSON analysis report. Field order is fixed by the struct layout and
//! every map is a `BTreeMap`, so equal inputs give byte-equal reports apart
//! from the `wall_time_ms` fields.

use serde::Serialize;

use reqlint_core::abstraction::AbstractionMap;
use reqlint_core::analyses::{Component, VacuityStatus};
use reqlint_core::engine::{EngineStats, Limit};
use reqlint_core::ltl::ValuedLasso;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReportVerdict {
    Consistent,
    Inconsistent,
    Indeterminate,
    ParseError,
}

impl ReportVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportVerdict::Consistent => "CONSISTENT",
            ReportVerdict::Inconsistent => "INCONSISTENT",
            ReportVerdict::Indeterminate => "INDETERMINATE",
            ReportVerdict::ParseError => "PARSE_ERROR",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ReportVerdict::Consistent => 0,
            ReportVerdict::Inconsistent => 1,
            ReportVerdict::ParseError => 2,
            ReportVerdict::Indeterminate => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Input {
    pub path: String,
    /// Hex SHA-256 of the file contents; null when the file is unreadable.
    pub sha256: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct RequirementStatus {
    pub line: usize,
    pub id: Option<String>,
    pub status: LineStatus,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MusEntry {
    pub ids: Vec<String>,
    /// False when a resource limit stopped the reduction early.
    pub minimal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VacuityEntry {
    pub id: String,
    pub trigger: String,
    pub status: VacuityStatus,
    pub witness: Option<ValuedLasso>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentEntry {
    pub ids: Vec<String>,
    pub flagged: bool,
}

impl From<&Component> for ComponentEntry {
    fn from(c: &Component) -> Self {
        ComponentEntry { ids: c.ids.clone(), flagged: c.flagged }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub command: String,
    pub input: Input,
    pub requirements: Vec<RequirementStatus>,
    /// Null for `graph` and `emit`, which decide nothing.
    pub verdict: Option<ReportVerdict>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
    pub abstraction: Option<AbstractionMap>,
    pub witness: Option<ValuedLasso>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mus: Option<MusEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vacuity: Option<Vec<VacuityEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emitted: Option<String>,
    pub stats: EngineStats,
    pub limit: Option<Limit>,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn new(command: &str, path: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: Tool { name: "reqlint", version: env!("CARGO_PKG_VERSION") },
            command: command.to_string(),
            input: Input { path: path.to_string(), sha256: None },
            requirements: Vec::new(),
            verdict: None,
            warnings: Vec::new(),
            errors: Vec::new(),
            abstraction: None,
            witness: None,
            mus: None,
            vacuity: None,
            components: None,
            emitted: None,
            stats: EngineStats::default(),
            limit: None,
            wall_time_ms: 0.0,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.map_or(0, ReportVerdict::exit_code)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
