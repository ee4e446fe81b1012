//! Python bindings. Models are opaque `Model` objects; queries, witnesses,
//! parameters and results cross the boundary as plain dicts and lists in
//! the same JSON shapes the command-line tool uses.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::Value;

use modelxp::circuits::compile;
use modelxp::explain::{oracle_min, DEFAULT_GUARD};
use modelxp::format::{
    example_from_value, model_from_value, model_to_string, model_to_value, query_from_value,
    query_to_value, witness_from_value, witness_to_value,
};
use modelxp::gadgets::generate as run_generator;
use modelxp::solve::{explain as solve, verify as check, Options, Route, DEFAULT_CAP_NODES};
use modelxp::models::check_example;
use modelxp::{Classifier, Error, Model as CoreModel};

fn to_py(e: Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_value(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    let json = obj.py().import("json")?;
    let text: String = json.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn from_value<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A decision tree, decision set, decision list, OBDD or majority ensemble.
#[pyclass(name = "Model", module = "modelxp", frozen)]
struct Model {
    inner: CoreModel,
}

#[pymethods]
impl Model {
    /// Parse a model from a JSON string.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Model {
            inner: model_from_value(&v).map_err(to_py)?,
        })
    }

    /// Build a model from a dict in the JSON model format.
    #[staticmethod]
    fn from_dict(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Model {
            inner: model_from_value(&to_value(obj)?).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        model_to_string(&self.inner)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        from_value(py, &model_to_value(&self.inner))
    }

    #[getter]
    fn kind(&self) -> String {
        match &self.inner {
            CoreModel::Ensemble(e) => format!("{}-ensemble", e.kind()),
            m => m.kind().to_string(),
        }
    }

    #[getter]
    fn features(&self) -> Vec<String> {
        self.inner.feature_names().to_vec()
    }

    /// Number of elements; 1 for a single model.
    fn __len__(&self) -> usize {
        self.inner.elements().len()
    }

    /// Classify a complete example given as a feature -> 0/1 dict or as a
    /// list of booleans in feature order.
    fn classify(&self, example: &Bound<'_, PyAny>) -> PyResult<bool> {
        let e = match example.extract::<Vec<bool>>() {
            Ok(bits) => {
                check_example(&self.inner, &bits).map_err(to_py)?;
                bits
            }
            Err(_) => example_from_value(self.inner.feature_names(), &to_value(example)?)
                .map_err(to_py)?
                .into_bits(),
        };
        Ok(self.inner.classify(&e))
    }

    fn parameters<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let v = serde_json::to_value(self.inner.parameters()).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        from_value(py, &v)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(kind={:?}, features={}, elements={})",
            self.kind(),
            self.inner.num_features(),
            self.inner.elements().len()
        )
    }
}

/// Compute an explanation. Returns a dict with `witness`, `size`,
/// `algorithm` and `status`.
#[pyfunction]
#[pyo3(signature = (model, query, route=None, cap_nodes=DEFAULT_CAP_NODES, guard=DEFAULT_GUARD))]
fn explain<'py>(
    py: Python<'py>,
    model: &Model,
    query: &Bound<'py, PyAny>,
    route: Option<&str>,
    cap_nodes: usize,
    guard: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let m = &model.inner;
    let q = query_from_value(m.feature_names(), &to_value(query)?).map_err(to_py)?;
    let opts = Options {
        route: route.map(str::parse::<Route>).transpose().map_err(to_py)?,
        cap_nodes,
        guard,
        timeout: None,
    };
    let sol = py.detach(|| solve(m, &q, &opts)).map_err(to_py)?;
    let names = m.feature_names();
    let v = serde_json::json!({
        "witness": sol.witness.as_ref().map(|w| witness_to_value(names, w)),
        "size": sol.witness.as_ref().map(|w| w.size()),
        "algorithm": sol.route.name(),
        "status": if sol.witness.is_some() { "witness" } else { "none" },
    });
    from_value(py, &v)
}

/// Minimum explanation from the exhaustive oracle, or None.
#[pyfunction]
#[pyo3(signature = (model, query, guard=DEFAULT_GUARD))]
fn oracle<'py>(
    py: Python<'py>,
    model: &Model,
    query: &Bound<'py, PyAny>,
    guard: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let m = &model.inner;
    let q = query_from_value(m.feature_names(), &to_value(query)?).map_err(to_py)?;
    let w = oracle_min(m, &q, guard).map_err(to_py)?;
    from_value(py, &w.map_or(Value::Null, |w| witness_to_value(m.feature_names(), &w)))
}

/// Whether `witness` answers `query`; with `minimal`, also subset-minimal.
#[pyfunction]
#[pyo3(signature = (model, query, witness, minimal=false, guard=DEFAULT_GUARD))]
fn verify(
    model: &Model,
    query: &Bound<'_, PyAny>,
    witness: &Bound<'_, PyAny>,
    minimal: bool,
    guard: usize,
) -> PyResult<bool> {
    let m = &model.inner;
    let q = query_from_value(m.feature_names(), &to_value(query)?).map_err(to_py)?;
    let w = witness_from_value(m.feature_names(), &to_value(witness)?).map_err(to_py)?;
    Ok(check(m, &q, &w, minimal, guard).map_err(to_py)? && q.budget.is_none_or(|k| w.size() <= k))
}

/// Run a named generator. Returns `(model, query, info)`; `query` is None
/// for generators without an associated question.
#[pyfunction]
fn generate<'py>(
    py: Python<'py>,
    name: &str,
    params: &Bound<'py, PyAny>,
) -> PyResult<(Model, Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let g = run_generator(name, &to_value(params)?).map_err(to_py)?;
    let q = g
        .query
        .as_ref()
        .map_or(Value::Null, |q| query_to_value(g.model.feature_names(), q));
    Ok((Model { inner: g.model }, from_value(py, &q)?, from_value(py, &g.info)?))
}

/// Compile to a Boolean circuit that is true exactly on class `class_`.
/// Returns the circuit as a dict of gates plus metadata.
#[pyfunction]
fn compile_circuit<'py>(py: Python<'py>, model: &Model, class_: bool) -> PyResult<Bound<'py, PyAny>> {
    let c = compile(&model.inner, class_).map_err(to_py)?;
    from_value(py, &c.to_json())
}

#[pymodule(name = "modelxp")]
fn modelxp_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(explain, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(compile_circuit, m)?)?;
    m.add("DEFAULT_GUARD", DEFAULT_GUARD)?;
    Ok(())
}
