//! Python bindings. Sets come back as sorted lists of field ids and reports
//! as plain dicts shaped like the JSON output of the command-line tool.

use std::collections::BTreeMap;

use autofill_core::filling::{self, FillingError};
use autofill_core::form::{self, FillError, FormSpec};
use autofill_core::{closure, closure_with, DepGraph, FillingAnalysis, GraphError, Mode, VertexId, VertexSet};
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyFloat, PyInt, PyString};
use serde::Serialize;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn graph_error(e: GraphError) -> PyErr {
    match e {
        GraphError::UnknownVertex(_) => PyKeyError::new_err(e.to_string()),
        other => value_error(other),
    }
}

fn filling_error(e: FillingError) -> PyErr {
    match e {
        FillingError::Graph(g) => graph_error(g),
        other => value_error(other),
    }
}

fn fill_error(e: FillError) -> PyErr {
    match e {
        FillError::UnknownField(_) => PyKeyError::new_err(e.to_string()),
        FillError::TypeError { .. } => value_error(e),
        FillError::Eval { .. } | FillError::Result { .. } => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    mode.parse().map_err(value_error)
}

fn to_set(ids: Vec<String>) -> VertexSet {
    ids.into_iter().map(VertexId::from).collect()
}

fn to_list(set: &VertexSet) -> Vec<String> {
    set.iter().map(|v| v.as_str().to_owned()).collect()
}

/// Converts any serializable report into Python objects via `json.loads`.
fn to_python<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn json_of(value: &Bound<'_, PyAny>) -> PyResult<serde_json::Value> {
    if value.is_instance_of::<PyBool>() {
        Ok(serde_json::Value::Bool(value.extract()?))
    } else if value.is_instance_of::<PyInt>() {
        Ok(serde_json::Value::from(value.extract::<i64>()?))
    } else if value.is_instance_of::<PyFloat>() {
        Ok(serde_json::Value::from(value.extract::<f64>()?))
    } else if value.is_instance_of::<PyString>() {
        Ok(serde_json::Value::String(value.extract()?))
    } else {
        Err(PyTypeError::new_err(format!(
            "field values must be int, float or str, got {}",
            value.get_type().name()?
        )))
    }
}

/// A directed dependency graph without self-loops.
#[pyclass(name = "Graph", module = "autofill", frozen)]
pub struct PyGraph {
    inner: DepGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(vertices: Vec<String>, edges: Vec<(String, String)>) -> PyResult<Self> {
        let edges = edges.into_iter().map(|(a, b)| (VertexId::from(a), VertexId::from(b)));
        let inner = DepGraph::new(vertices.into_iter().map(VertexId::from), edges).map_err(graph_error)?;
        Ok(PyGraph { inner })
    }

    /// Parses `{"vertices": [...], "edges": [[from, to], ...]}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = serde_json::from_str(text).map_err(value_error)?;
        Ok(PyGraph { inner: DepGraph::from_doc(&doc).map_err(graph_error)? })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_doc()).expect("graph documents serialize")
    }

    fn vertices(&self) -> Vec<String> {
        self.inner.vertices().iter().map(|v| v.as_str().to_owned()).collect()
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.inner.edges().map(|(a, b)| (a.as_str().to_owned(), b.as_str().to_owned())).collect()
    }

    fn sources(&self) -> Vec<String> {
        to_list(&self.inner.sources())
    }

    fn has_path(&self, source: &str, target: &str) -> PyResult<bool> {
        self.inner.has_path(&source.into(), &target.into()).map_err(graph_error)
    }

    fn is_dag(&self) -> bool {
        self.inner.is_dag()
    }

    fn minimal_cycles(&self) -> Vec<Vec<String>> {
        autofill_core::minimal_cycles(&self.inner).iter().map(|c| to_list(&c.members)).collect()
    }

    fn sccs(&self) -> Vec<Vec<String>> {
        autofill_core::scc(&self.inner)
            .into_iter()
            .map(|c| c.into_iter().map(|v| v.as_str().to_owned()).collect())
            .collect()
    }

    /// Closure stages starting from `provided`; the last stage is the
    /// fixed point.
    #[pyo3(signature = (provided, mode = "complete"))]
    fn closure(&self, provided: Vec<String>, mode: &str) -> PyResult<Vec<Vec<String>>> {
        let trace = closure(&self.inner, &to_set(provided), parse_mode(mode)?).map_err(graph_error)?;
        Ok(trace.stages.iter().map(to_list).collect())
    }

    #[pyo3(signature = (provided, mode = "complete"))]
    fn is_filling(&self, provided: Vec<String>, mode: &str) -> PyResult<bool> {
        filling::is_filling(&self.inner, &to_set(provided), parse_mode(mode)?).map_err(graph_error)
    }

    /// The complete-mode verdict from each of the three characterizations,
    /// as `(closure, cycles, dag)`.
    fn filling_verdicts(&self, provided: Vec<String>) -> PyResult<(bool, bool, bool)> {
        let set = to_set(provided);
        let analysis = FillingAnalysis::new(&self.inner);
        Ok((
            filling::is_filling(&self.inner, &set, Mode::Complete).map_err(graph_error)?,
            analysis.is_filling_by_cycles(&set).map_err(graph_error)?,
            analysis.is_filling_by_dag(&set).map_err(graph_error)?,
        ))
    }

    /// The partial-mode verdict as `(closure, components, paths)`.
    fn p_filling_verdicts(&self, provided: Vec<String>) -> PyResult<(bool, bool, bool)> {
        let set = to_set(provided);
        let analysis = FillingAnalysis::new(&self.inner);
        Ok((
            filling::is_filling(&self.inner, &set, Mode::Partial).map_err(graph_error)?,
            analysis.is_p_filling_by_scc(&set).map_err(graph_error)?,
            analysis.is_p_filling_by_path(&set).map_err(graph_error)?,
        ))
    }

    fn greedy_min_filling(&self) -> Vec<String> {
        to_list(&filling::greedy_min_filling(&self.inner))
    }

    fn min_p_filling(&self) -> Vec<String> {
        to_list(&filling::min_p_filling(&self.inner))
    }

    #[pyo3(signature = (mode = "complete"))]
    fn exact_min_fillings(&self, mode: &str) -> PyResult<Vec<Vec<String>>> {
        let sets = filling::exact_min_fillings(&self.inner, parse_mode(mode)?).map_err(filling_error)?;
        Ok(sets.iter().map(to_list).collect())
    }

    #[pyo3(signature = (provided, mode = "complete"))]
    fn suggest_additional(&self, provided: Vec<String>, mode: &str) -> PyResult<Vec<String>> {
        let extra =
            filling::suggest_additional(&self.inner, &to_set(provided), parse_mode(mode)?).map_err(graph_error)?;
        Ok(to_list(&extra))
    }

    #[pyo3(signature = (exact = false))]
    fn analyze<'py>(&self, py: Python<'py>, exact: bool) -> PyResult<Bound<'py, PyAny>> {
        let report = filling::analyze(&self.inner, exact).map_err(filling_error)?;
        to_python(py, &report)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Graph({} vertices, {} edges)", self.inner.len(), self.inner.edge_count())
    }
}

/// A parsed form specification with its replacement rules.
#[pyclass(name = "FormSpec", module = "autofill", frozen)]
pub struct PyFormSpec {
    inner: FormSpec,
}

#[pymethods]
impl PyFormSpec {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = form::parse_form_spec(text.as_bytes()).map_err(value_error)?;
        Ok(PyFormSpec { inner })
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        let bytes = std::fs::read(&path)?;
        let inner = form::parse_form_spec(&bytes).map_err(|e| value_error(format!("{}: {e}", path.display())))?;
        Ok(PyFormSpec { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    fn field_ids(&self) -> Vec<String> {
        self.inner.fields.iter().map(|f| f.id.as_str().to_owned()).collect()
    }

    fn graph(&self) -> PyGraph {
        PyGraph { inner: self.inner.induced_graph() }
    }

    fn mandatory(&self) -> Vec<String> {
        to_list(&self.inner.mandatory())
    }

    /// Fills what the rules determine from `values` and returns the report
    /// as a dict with `values`, `trace`, `status`, `missing` and
    /// `suggestions`.
    fn autofill<'py>(&self, py: Python<'py>, values: &Bound<'py, PyDict>) -> PyResult<Bound<'py, PyAny>> {
        let mut input = BTreeMap::new();
        for (key, value) in values.iter() {
            let id = VertexId::from(key.extract::<String>()?);
            let decl = self
                .inner
                .field(&id)
                .ok_or_else(|| fill_error(FillError::UnknownField(id.clone())))?;
            let value = decl
                .value_from_json(&json_of(&value)?)
                .map_err(|message| fill_error(FillError::TypeError { field: id.clone(), message }))?;
            input.insert(id, value);
        }
        let report = form::autofill(&self.inner, &input).map_err(fill_error)?;
        to_python(py, &report)
    }

    /// `{"filling", "stages", "suggestions"}` for `provided`. Without a
    /// mode each rule keeps its own.
    #[pyo3(signature = (provided, mode = None))]
    fn check<'py>(&self, py: Python<'py>, provided: Vec<String>, mode: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
        let set = to_set(provided);
        let g = self.inner.induced_graph();
        let (trace, suggestions) = match mode.map(parse_mode).transpose()? {
            Some(mode) => (
                closure(&g, &set, mode).map_err(graph_error)?,
                filling::suggest_additional(&g, &set, mode).map_err(graph_error)?,
            ),
            None => (
                closure_with(&g, &set, |v| self.inner.mode_of(v)).map_err(graph_error)?,
                form::suggest(&self.inner, &set).map_err(graph_error)?,
            ),
        };
        let out = PyDict::new(py);
        out.set_item("filling", trace.filled)?;
        out.set_item("stages", trace.stages.iter().map(to_list).collect::<Vec<_>>())?;
        out.set_item("suggestions", to_list(&suggestions))?;
        Ok(out.into_any())
    }

    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, &form::spec_report(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("FormSpec({:?}, {} fields, {} rules)", self.inner.name, self.inner.fields.len(), self.inner.rules.len())
    }
}

/// Adds the classes and constants to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyFormSpec>()?;
    m.add("EXACT_SEARCH_LIMIT", filling::EXACT_SEARCH_LIMIT)?;
    Ok(())
}

#[pymodule]
fn autofill(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
