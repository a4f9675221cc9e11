use std::time::Duration;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use reqlint_core::abstraction::build_abstraction;
use reqlint_core::analyses::{self, MusOutcome, VacuityStatus};
use reqlint_core::emit::{emit as emit_problem, EmitTarget};
use reqlint_core::engine::EngineConfig;
use reqlint_core::ltl::{self, ValuedLasso, ValuedState};
use reqlint_core::psp::{self, psp_to_ltl};
use reqlint_core::Constant;

create_exception!(reqlint, ParseError, PyValueError, "Malformed requirement or formula text.");
create_exception!(reqlint, AnalysisError, PyException, "An analysis could not run on the given input.");

fn analysis_error(e: impl std::fmt::Display) -> PyErr {
    AnalysisError::new_err(e.to_string())
}

fn config(max_states: Option<usize>, timeout: Option<f64>) -> PyResult<EngineConfig> {
    let mut config = EngineConfig::default();
    if let Some(n) = max_states {
        if n == 0 {
            return Err(PyValueError::new_err("max_states must be positive"));
        }
        config.max_states = n;
    }
    if let Some(t) = timeout {
        config.timeout = Duration::try_from_secs_f64(t).map_err(|e| PyValueError::new_err(e.to_string()))?;
    }
    Ok(config)
}

/// An LTL formula over propositions and `x < c` style constraints.
#[pyclass(frozen, skip_from_py_object, module = "reqlint")]
#[derive(Clone)]
struct Formula(ltl::Formula);

#[pymethods]
impl Formula {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        ltl::parse_formula(text).map(Formula).map_err(|e| ParseError::new_err(e.to_string()))
    }

    fn nnf(&self) -> Self {
        Formula(ltl::to_nnf(&self.0))
    }

    /// Proposition and variable names in first-occurrence order.
    fn symbols(&self) -> Vec<String> {
        self.0.symbol_names().into_iter().map(String::from).collect()
    }

    fn size(&self) -> usize {
        self.0.size()
    }

    fn smv(&self) -> String {
        ltl::render(&self.0, ltl::Dialect::Smv)
    }

    /// Truth on the word `prefix · loop^ω`. Each state maps proposition
    /// names to bools and variable names to numbers.
    fn evaluate(&self, prefix: Vec<Bound<'_, PyDict>>, r#loop: Vec<Bound<'_, PyDict>>) -> PyResult<bool> {
        let prefix = prefix.iter().map(valued_state).collect::<PyResult<Vec<_>>>()?;
        let cycle = r#loop.iter().map(valued_state).collect::<PyResult<Vec<_>>>()?;
        ltl::eval_on_valued_lasso(&self.0, &ValuedLasso { prefix, cycle }).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.0.to_string())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }
}

fn valued_state(state: &Bound<'_, PyDict>) -> PyResult<ValuedState> {
    let mut out = ValuedState::default();
    for (key, value) in state.iter() {
        let name: String = key.extract()?;
        if let Ok(b) = value.extract::<bool>() {
            out.props.insert(name, b);
        } else {
            let text = value.str()?.to_string();
            let constant = text
                .parse::<Constant>()
                .or_else(|_| fraction_text(&text).parse::<Constant>())
                .map_err(|_| PyValueError::new_err(format!("`{name}`: not a boolean or number: {text}")))?;
            out.values.insert(name, constant);
        }
    }
    Ok(out)
}

/// `str(Fraction)` gives `n/d`; ints, floats and `Decimal` parse directly.
fn fraction_text(text: &str) -> String {
    match text.split_once('/') {
        Some((n, d)) => match (n.trim().parse::<i64>(), d.trim().parse::<i64>()) {
            (Ok(n), Ok(d)) if d != 0 => Constant::from_ratio(n, d).to_string(),
            _ => text.to_string(),
        },
        None => text.to_string(),
    }
}

/// A parsed `.req` requirement set.
#[pyclass(frozen, module = "reqlint")]
struct RequirementSet(psp::RequirementSet);

#[pymethods]
impl RequirementSet {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        psp::parse_requirements(text).map(RequirementSet).map_err(|e| ParseError::new_err(e.to_string()))
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.0.ids().into_iter().map(String::from).collect()
    }

    /// LTL translation of one requirement.
    fn formula(&self, id: &str) -> PyResult<Formula> {
        match self.0.get(id) {
            Some(r) => Ok(Formula(psp_to_ltl(r))),
            None => Err(pyo3::exceptions::PyKeyError::new_err(id.to_string())),
        }
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("RequirementSet({:?})", self.0.ids())
    }
}

fn lasso_to_py<'py>(py: Python<'py>, lasso: &ValuedLasso) -> PyResult<Bound<'py, PyDict>> {
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    let states = |states: &[ValuedState]| -> PyResult<Bound<'py, PyList>> {
        let list = PyList::empty(py);
        for s in states {
            let d = PyDict::new(py);
            for (k, v) in &s.props {
                d.set_item(k, v)?;
            }
            for (k, v) in &s.values {
                d.set_item(k, fraction.call1((v.to_string(),))?)?;
            }
            list.append(d)?;
        }
        Ok(list)
    };
    let out = PyDict::new(py);
    out.set_item("prefix", states(&lasso.prefix)?)?;
    out.set_item("loop", states(&lasso.cycle)?)?;
    Ok(out)
}

/// Outcome of a consistency check.
#[pyclass(frozen, get_all, module = "reqlint")]
struct Consistency {
    /// `CONSISTENT`, `INCONSISTENT` or `INDETERMINATE`.
    verdict: String,
    /// `{"prefix": [...], "loop": [...]}` with a value for every signal, or None.
    witness: Option<Py<PyDict>>,
    states: usize,
}

#[pymethods]
impl Consistency {
    fn __repr__(&self) -> String {
        format!("Consistency(verdict={:?}, states={})", self.verdict, self.states)
    }
}

#[pyfunction]
#[pyo3(signature = (requirements, *, max_states=None, timeout=None))]
fn check(py: Python<'_>, requirements: &RequirementSet, max_states: Option<usize>, timeout: Option<f64>) -> PyResult<Consistency> {
    let config = config(max_states, timeout)?;
    let result = py.detach(|| analyses::check_consistency(&requirements.0, &config)).map_err(analysis_error)?;
    let witness = match &result.concrete_witness {
        Some(w) => Some(lasso_to_py(py, w)?.unbind()),
        None => None,
    };
    Ok(Consistency { verdict: result.verdict.as_str().to_string(), witness, states: result.stats.states })
}

/// Minimal inconsistent subset as a list of ids, or None when the set is
/// consistent. With `minimal` False a resource limit stopped the reduction.
#[pyfunction]
#[pyo3(signature = (requirements, *, max_states=None, timeout=None))]
fn explain(
    py: Python<'_>,
    requirements: &RequirementSet,
    max_states: Option<usize>,
    timeout: Option<f64>,
) -> PyResult<Option<(Vec<String>, bool)>> {
    let config = config(max_states, timeout)?;
    let result = py.detach(|| analyses::explain_inconsistency(&requirements.0, &config)).map_err(analysis_error)?;
    Ok(match result.outcome {
        MusOutcome::Found(mus) => Some((mus.ids, true)),
        MusOutcome::Consistent => None,
        MusOutcome::Indeterminate { remaining, .. } => Some((remaining, false)),
    })
}

/// `(id, trigger, status)` per requirement with a trigger; status is
/// `vacuous`, `non_vacuous` or `indeterminate`.
#[pyfunction]
#[pyo3(signature = (requirements, *, max_states=None, timeout=None))]
fn vacuity(
    py: Python<'_>,
    requirements: &RequirementSet,
    max_states: Option<usize>,
    timeout: Option<f64>,
) -> PyResult<Vec<(String, String, &'static str)>> {
    let config = config(max_states, timeout)?;
    let report = py.detach(|| analyses::check_vacuity(&requirements.0, &config)).map_err(analysis_error)?;
    Ok(report
        .findings
        .into_iter()
        .map(|f| {
            let status = match f.status {
                VacuityStatus::Vacuous => "vacuous",
                VacuityStatus::NonVacuous => "non_vacuous",
                VacuityStatus::Indeterminate => "indeterminate",
            };
            (f.id, f.trigger, status)
        })
        .collect())
}

/// Connected components of the shared-signal graph as `(ids, flagged)`.
#[pyfunction]
fn components(requirements: &RequirementSet) -> Vec<(Vec<String>, bool)> {
    analyses::check_connectivity(&requirements.0).components.into_iter().map(|c| (c.ids, c.flagged)).collect()
}

/// The abstracted problem as an SMV model (`smv`) or neutral LTL (`ltl`).
#[pyfunction]
#[pyo3(signature = (requirements, format="smv"))]
fn emit(requirements: &RequirementSet, format: &str) -> PyResult<String> {
    let target = match format {
        "smv" => EmitTarget::Smv,
        "ltl" => EmitTarget::NeutralLtl,
        other => return Err(PyValueError::new_err(format!("unknown format `{other}` (expected smv or ltl)"))),
    };
    let problem = build_abstraction(&psp::conjoin(&requirements.0)).map_err(analysis_error)?;
    Ok(emit_problem(&problem, target))
}

#[pymodule]
fn reqlint(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ParseError", m.py().get_type::<ParseError>())?;
    m.add("AnalysisError", m.py().get_type::<AnalysisError>())?;
    m.add_class::<Formula>()?;
    m.add_class::<RequirementSet>()?;
    m.add_class::<Consistency>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(explain, m)?)?;
    m.add_function(wrap_pyfunction!(vacuity, m)?)?;
    m.add_function(wrap_pyfunction!(components, m)?)?;
    m.add_function(wrap_pyfunction!(emit, m)?)?;
    Ok(())
}
