//! The `reqlint` command line: reads a `.req` file, runs the analysis named
//! by the subcommand and writes a human-readable summary plus, optionally,
//! a JSON report.

pub mod report;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use reqlint_core::abstraction::build_abstraction;
use reqlint_core::analyses::{
    check_connectivity, check_consistency, check_vacuity, explain_inconsistency, AnalysisError, Consistency, MusOutcome,
    VacuityStatus, Verdict,
};
use reqlint_core::emit::{emit, EmitTarget};
use reqlint_core::engine::{EngineConfig, EngineError, Limit, DEFAULT_MAX_STATES};
use reqlint_core::ltl::{ValuedLasso, ValuedState};
use reqlint_core::psp::{conjoin, parse_requirement_lines, RequirementSet};

pub use report::{Report, ReportVerdict};

#[derive(Debug, Parser)]
#[command(name = "reqlint", version, about = "Consistency checking for pattern-based requirements")]
struct Cli {
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Cap on tableau states per satisfiability check.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_MAX_STATES as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_states: u64,
    /// Cap on wall time per satisfiability check.
    #[arg(long, global = true, value_name = "SECONDS", default_value = "60", value_parser = parse_timeout)]
    timeout: Duration,
    /// Skip the shared-variable connectivity check.
    #[arg(long, global = true)]
    no_connectivity: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether the requirements can hold together.
    Check { file: PathBuf },
    /// Check, and on inconsistency list a minimal inconsistent subset.
    Explain { file: PathBuf },
    /// Check, then report requirements whose trigger can never occur.
    Vacuity { file: PathBuf },
    /// Group requirements by shared propositions and variables.
    Graph { file: PathBuf },
    /// Print the abstracted problem for an external model checker.
    Emit {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Smv,
    Ltl,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Explain { .. } => "explain",
            Command::Vacuity { .. } => "vacuity",
            Command::Graph { .. } => "graph",
            Command::Emit { .. } => "emit",
        }
    }

    fn file(&self) -> &PathBuf {
        match self {
            Command::Check { file }
            | Command::Explain { file }
            | Command::Vacuity { file }
            | Command::Graph { file }
            | Command::Emit { file, .. } => file,
        }
    }
}

fn parse_timeout(text: &str) -> Result<Duration, String> {
    let seconds: f64 = text.parse().map_err(|_| format!("`{text}` is not a number of seconds"))?;
    Duration::try_from_secs_f64(seconds).map_err(|_| format!("`{text}` is not a valid timeout"))
}

/// Terminal styling, from `REQLINT_COLOR=0|1` or else whether stdout is a
/// terminal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Style {
    pub color: bool,
}

impl Style {
    pub fn detect(env: Option<&str>, is_terminal: bool) -> Self {
        let color = match env {
            Some("0") => false,
            Some("1") => true,
            _ => is_terminal,
        };
        Style { color }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn verdict(&self, v: ReportVerdict) -> String {
        let code = match v {
            ReportVerdict::Consistent => "1;32",
            ReportVerdict::Inconsistent => "1;31",
            ReportVerdict::Indeterminate => "1;33",
            ReportVerdict::ParseError => "1;31",
        };
        self.paint(code, v.as_str())
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, style: Style) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = if style.color { e.render().ansi().to_string() } else { e.render().to_string() };
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };

    let started = Instant::now();
    let config = EngineConfig { max_states: cli.max_states as usize, timeout: cli.timeout };
    let mut report = Report::new(cli.command.name(), &cli.command.file().display().to_string());
    let requirements = load(cli.command.file(), &mut report);
    if let Some(requirements) = requirements {
        if requirements.is_empty() {
            report.warnings.push("empty set: the file contains no requirements".into());
        }
        analyse(&cli, &requirements, &config, &mut report);
    }
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1000.0;

    let text = render(&report, style);
    let _ = if matches!(cli.command, Command::Emit { .. }) {
        err.write_all(text.as_bytes())
    } else {
        out.write_all(text.as_bytes())
    };
    if let Some(emitted) = &report.emitted {
        let _ = out.write_all(emitted.as_bytes());
    }

    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    report.exit_code()
}

/// Reads and parses the input, recording per-line status. `None` when the
/// analysis cannot proceed.
fn load(path: &PathBuf, report: &mut Report) -> Option<RequirementSet> {
    let bytes = match std::fs::read(path) {
        Ok(bytes) => bytes,
        Err(e) => {
            report.errors.push(format!("cannot read {}: {e}", path.display()));
            report.verdict = Some(ReportVerdict::ParseError);
            return None;
        }
    };
    report.input.sha256 = Some(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect());
    let text = match String::from_utf8(bytes) {
        Ok(text) => text,
        Err(e) => {
            report.errors.push(format!("{} is not valid UTF-8: {e}", path.display()));
            report.verdict = Some(ReportVerdict::ParseError);
            return None;
        }
    };

    let mut parsed = Vec::new();
    for outcome in parse_requirement_lines(&text) {
        let (status, error) = match outcome.result {
            Ok(requirement) => {
                parsed.push(requirement);
                (report::LineStatus::Ok, None)
            }
            Err(e) => {
                report.errors.push(format!("{}: {e}", path.display()));
                (report::LineStatus::Error, Some(e.to_string()))
            }
        };
        report.requirements.push(report::RequirementStatus { line: outcome.line, id: outcome.id, status, error });
    }
    if !report.errors.is_empty() {
        report.verdict = Some(ReportVerdict::ParseError);
        return None;
    }
    Some(RequirementSet::new(parsed))
}

fn analyse(cli: &Cli, requirements: &RequirementSet, config: &EngineConfig, report: &mut Report) {
    let result = match &cli.command {
        Command::Check { .. } => consistency(requirements, config, report),
        Command::Explain { .. } => explain(requirements, config, report),
        Command::Vacuity { .. } => vacuity(requirements, config, report),
        Command::Graph { .. } => {
            connectivity(requirements, report);
            Ok(())
        }
        Command::Emit { format, .. } => {
            let target = match format {
                Format::Smv => EmitTarget::Smv,
                Format::Ltl => EmitTarget::NeutralLtl,
            };
            build_abstraction(&conjoin(requirements))
                .map(|problem| {
                    report.abstraction = Some(problem.map.clone());
                    report.emitted = Some(emit(&problem, target));
                })
                .map_err(AnalysisError::from)
        }
    };
    if let Err(e) = result {
        record_failure(e, report);
        return;
    }
    if matches!(cli.command, Command::Check { .. } | Command::Explain { .. }) && !cli.no_connectivity {
        connectivity(requirements, report);
    }
}

/// Abstraction errors are input errors; engine errors are internal and
/// leave the question undecided.
fn record_failure(e: AnalysisError, report: &mut Report) {
    report.errors.push(e.to_string());
    report.witness = None;
    report.verdict = Some(match e {
        AnalysisError::Abstraction(_) | AnalysisError::Engine(EngineError::Abstraction(_)) => ReportVerdict::ParseError,
        AnalysisError::Engine(_) => ReportVerdict::Indeterminate,
    });
}

fn apply_consistency(c: &Consistency, report: &mut Report) {
    report.verdict = Some(match c.verdict {
        Verdict::Consistent => ReportVerdict::Consistent,
        Verdict::Inconsistent => ReportVerdict::Inconsistent,
        Verdict::Indeterminate => ReportVerdict::Indeterminate,
    });
    report.abstraction = Some(c.abstraction.map.clone());
    report.witness = c.concrete_witness.clone();
    report.stats.absorb(&c.stats);
    report.limit = c.limit;
    if let Some(limit) = c.limit {
        report.warnings.push(format!("no verdict: {}", limit_text(limit)));
    }
}

fn limit_text(limit: Limit) -> &'static str {
    match limit {
        Limit::States => "state limit reached (raise --max-states)",
        Limit::Time => "time limit reached (raise --timeout)",
    }
}

fn consistency(requirements: &RequirementSet, config: &EngineConfig, report: &mut Report) -> Result<(), AnalysisError> {
    let c = check_consistency(requirements, config)?;
    apply_consistency(&c, report);
    Ok(())
}

fn explain(requirements: &RequirementSet, config: &EngineConfig, report: &mut Report) -> Result<(), AnalysisError> {
    let c = check_consistency(requirements, config)?;
    apply_consistency(&c, report);
    if c.verdict != Verdict::Inconsistent {
        return Ok(());
    }
    let result = explain_inconsistency(requirements, config)?;
    report.stats.absorb(&result.stats);
    match result.outcome {
        MusOutcome::Found(mus) => report.mus = Some(report::MusEntry { ids: mus.ids, minimal: true }),
        MusOutcome::Indeterminate { remaining, limit } => {
            report.warnings.push(format!(
                "subset reduction stopped early: {}; the listed subset is inconsistent but may not be minimal",
                limit_text(limit)
            ));
            report.limit = Some(limit);
            report.mus = Some(report::MusEntry { ids: remaining, minimal: false });
        }
        MusOutcome::Consistent => {}
    }
    Ok(())
}

fn vacuity(requirements: &RequirementSet, config: &EngineConfig, report: &mut Report) -> Result<(), AnalysisError> {
    let v = check_vacuity(requirements, config)?;
    apply_consistency(&v.consistency, report);
    report.stats = v.stats.clone();
    let mut entries = Vec::new();
    for f in v.findings {
        match f.status {
            VacuityStatus::Vacuous => report
                .warnings
                .push(format!("{} holds vacuously: its trigger `{}` can never occur", f.id, f.trigger)),
            VacuityStatus::Indeterminate => {
                let limit = f.limit.expect("indeterminate finding has a limit");
                report.warnings.push(format!("{}: vacuity undecided, {}", f.id, limit_text(limit)));
                report.limit.get_or_insert(limit);
            }
            VacuityStatus::NonVacuous => {}
        }
        entries.push(report::VacuityEntry { id: f.id, trigger: f.trigger, status: f.status, witness: f.witness });
    }
    report.vacuity = Some(entries);
    Ok(())
}

fn connectivity(requirements: &RequirementSet, report: &mut Report) {
    let c = check_connectivity(requirements);
    let total = c.components.len();
    for component in c.flagged() {
        let subject = match component.ids.as_slice() {
            [one] => format!("{one} shares"),
            many => format!("{} share", many.join(", ")),
        };
        report
            .warnings
            .push(format!("{subject} no proposition or variable with the other requirements ({total} components)"));
    }
    report.components = Some(c.components.iter().map(Into::into).collect());
}

fn render(report: &Report, style: Style) -> String {
    let mut s = String::new();
    for e in &report.errors {
        writeln!(s, "{} {e}", style.paint("1;31", "error:")).unwrap();
    }
    if let Some(verdict) = report.verdict {
        if verdict != ReportVerdict::ParseError {
            let n = report.requirements.len();
            let states = report.stats.states;
            writeln!(s, "{}  ({})", style.verdict(verdict), [plural(n, "requirement"), plural(states, "state")].join(", "))
                .unwrap();
        } else {
            writeln!(s, "{}", style.verdict(verdict)).unwrap();
        }
    }
    if let Some(w) = &report.witness {
        if w.prefix.iter().chain(&w.cycle).any(|st| !st.props.is_empty() || !st.values.is_empty()) {
            s.push_str("witness:\n");
            render_lasso(&mut s, w);
        }
    }
    if let Some(mus) = &report.mus {
        let label = if mus.minimal { "minimal inconsistent subset" } else { "inconsistent subset" };
        writeln!(s, "{label}: {}", mus.ids.join(", ")).unwrap();
    }
    if let Some(findings) = &report.vacuity {
        if findings.is_empty() {
            s.push_str("vacuity: no requirement with a trigger\n");
        } else {
            s.push_str("vacuity:\n");
            let width = findings.iter().map(|f| f.id.len()).max().unwrap_or(0);
            for f in findings {
                let status = match f.status {
                    VacuityStatus::Vacuous => style.paint("33", "vacuous"),
                    VacuityStatus::NonVacuous => "non-vacuous".to_string(),
                    VacuityStatus::Indeterminate => style.paint("33", "undecided"),
                };
                writeln!(s, "  {:width$}  {status}  (trigger {})", f.id, f.trigger).unwrap();
            }
        }
    }
    if let Some(components) = &report.components {
        if report.command == "graph" {
            writeln!(s, "{}", plural(components.len(), "component")).unwrap();
            for (i, c) in components.iter().enumerate() {
                let flag = if c.flagged { style.paint("33", "  (flagged)") } else { String::new() };
                writeln!(s, "  [{}] {}{flag}", i + 1, c.ids.join(", ")).unwrap();
            }
        }
    }
    for w in &report.warnings {
        writeln!(s, "{} {w}", style.paint("1;33", "warning:")).unwrap();
    }
    s
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn render_lasso(s: &mut String, w: &ValuedLasso) {
    let state = |st: &ValuedState| -> String {
        let props = st.props.iter().map(|(k, v)| if *v { k.clone() } else { format!("!{k}") });
        let values = st.values.iter().map(|(k, v)| format!("{k}={v}"));
        props.chain(values).collect::<Vec<_>>().join(" ")
    };
    for (i, st) in w.prefix.iter().enumerate() {
        writeln!(s, "  {i:>3}  {}", state(st)).unwrap();
    }
    for (i, st) in w.cycle.iter().enumerate() {
        let marker = if i == 0 { "  <- loop starts" } else { "" };
        writeln!(s, "  {:>3}  {}{marker}", w.prefix.len() + i, state(st)).unwrap();
    }
}
