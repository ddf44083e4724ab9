//! Python bindings: codes, doubling, kernel analysis, STS types and the
//! SQS-graph structure check.

use std::sync::OnceLock;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use perfcode_core::algebra::{kernel, rank};
use perfcode_core::doubling::{double as double_code, DoublingSpec, Sigma};
use perfcode_core::fano::families;
use perfcode_core::partitions::{classify_partitions, enumerate_partitions7, enumerate_partitions8, Partition};
use perfcode_core::perfect::enumerate_perfect7;
use perfcode_core::pipeline::{analyze, labelled_graph, sts_types};
use perfcode_core::sqs::{GraphJson, SqsGraph};
use perfcode_core::verify::{full_report, verify_graph_json};
use perfcode_core::words::{format_quadruples, CodeJson};

fn err(e: perfcode_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serialize through JSON into plain Python objects.
fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Length-8 class representatives in this crate's class order.
fn classes8() -> PyResult<&'static [Partition]> {
    static CLASSES: OnceLock<Vec<Partition>> = OnceLock::new();
    if let Some(c) = CLASSES.get() {
        return Ok(c);
    }
    let c = classify_partitions(&enumerate_partitions8()).map_err(err)?;
    Ok(CLASSES.get_or_init(|| c.classes.into_iter().map(|c| c.representative).collect()))
}

/// A binary code; coordinate `i` of a word is bit `i`.
#[pyclass(name = "Code", module = "perfcode", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCode {
    inner: perfcode_core::words::Code,
}

#[pymethods]
impl PyCode {
    #[new]
    fn new(length: usize, words: Vec<u16>) -> PyResult<Self> {
        Ok(PyCode { inner: perfcode_core::words::Code::new(length, words).map_err(err)? })
    }

    /// Parse the `{"length": n, "words": [...]}` JSON form.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: CodeJson = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyCode { inner: perfcode_core::words::Code::from_json(&j).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_json()).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn length(&self) -> usize {
        self.inner.length()
    }

    #[getter]
    fn words(&self) -> Vec<u16> {
        self.inner.words().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, w: u16) -> bool {
        self.inner.contains_bits(w)
    }

    fn __repr__(&self) -> String {
        format!("Code(length={}, size={})", self.inner.length(), self.inner.len())
    }

    fn min_distance(&self) -> Option<u32> {
        self.inner.min_distance()
    }

    fn rank(&self) -> PyResult<usize> {
        rank(&self.inner).map_err(err)
    }

    /// Kernel basis of a code through zero.
    fn kernel(&self) -> PyResult<Vec<u16>> {
        Ok(kernel(&self.inner).map_err(err)?.basis())
    }

    /// `{"rank", "kernelDim", "cosetCount"}`.
    fn analyze(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let a = py.detach(|| analyze(&self.inner)).map_err(err)?;
        to_py(py, &a)
    }

    /// STS type tuple per kernel class; `?` marks an untabulated signature.
    fn sts_types(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let (report, _) = py.detach(|| sts_types(&self.inner)).map_err(err)?;
        to_py(py, &report)
    }

    /// Loop and link structure check of the SQS-graph over the kernel.
    fn verify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let r = py.detach(|| full_report(&self.inner)).map_err(err)?;
        to_py(py, &r)
    }

    /// The SQS-graph as `dot`, `csv` or `json` text.
    fn export(&self, py: Python<'_>, format: &str) -> PyResult<String> {
        let g = py.detach(|| labelled_graph(&self.inner)).map_err(err)?;
        match format {
            "dot" => Ok(g.to_dot()),
            "csv" => Ok(g.to_csv()),
            "json" => serde_json::to_string_pretty(&g.to_json()).map_err(|e| PyValueError::new_err(e.to_string())),
            other => Err(err(perfcode_core::Error::UnknownFormat(other.to_string()))),
        }
    }
}

/// Double length-8 classes `source` and `target` under `sigma`, e.g. "01234576".
#[pyfunction]
fn double(py: Python<'_>, source: usize, target: usize, sigma: &str) -> PyResult<PyCode> {
    let sigma: Sigma = sigma.parse().map_err(err)?;
    let classes = py.detach(classes8)?;
    let pick = |i: usize| {
        classes.get(i).cloned().ok_or_else(|| PyValueError::new_err(format!("no partition class {i}")))
    };
    let spec = DoublingSpec { source: pick(source)?, target: pick(target)?, sigma };
    Ok(PyCode { inner: double_code(&spec).map_err(err)? })
}

/// Every 1-perfect code of length 7, translates included.
#[pyfunction]
fn perfect_codes() -> Vec<PyCode> {
    enumerate_perfect7().into_iter().map(|p| PyCode { inner: p.code }).collect()
}

/// Number of equivalence classes of 1-perfect partitions of length 7 or 8.
#[pyfunction]
fn partition_class_count(py: Python<'_>, length: usize) -> PyResult<usize> {
    match length {
        7 => py.detach(|| classify_partitions(&enumerate_partitions7())).map(|c| c.classes.len()).map_err(err),
        8 => Ok(py.detach(classes8)?.len()),
        _ => Err(PyValueError::new_err("length must be 7 or 8")),
    }
}

/// Named quadruple families on eight points.
#[pyfunction]
fn fano_families() -> Vec<(String, Vec<String>)> {
    families().into_iter().map(|(n, s)| (n.to_string(), format_quadruples(&s))).collect()
}

/// Structure check of a graph given as exported JSON.
#[pyfunction]
fn verify_graph(py: Python<'_>, graph_json: &str) -> PyResult<Py<PyAny>> {
    let j: GraphJson = serde_json::from_str(graph_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let g = SqsGraph::from_json(&j).map_err(err)?;
    let r = py.detach(|| verify_graph_json(&g)).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn perfcode(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCode>()?;
    m.add_function(wrap_pyfunction!(double, m)?)?;
    m.add_function(wrap_pyfunction!(perfect_codes, m)?)?;
    m.add_function(wrap_pyfunction!(partition_class_count, m)?)?;
    m.add_function(wrap_pyfunction!(fano_families, m)?)?;
    m.add_function(wrap_pyfunction!(verify_graph, m)?)?;
    Ok(())
}
