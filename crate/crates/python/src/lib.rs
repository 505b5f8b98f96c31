//! Python module `circrank`.
//!
//! Results with many fields (binary rank outcomes, reports, canonical
//! forms) come back as plain dicts with the same layout as the CLI's JSON.

use std::time::Duration;

use circrank_core as core;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

fn value_error(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes through JSON into Python objects.
fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// Blocks `(n, k)` of a circulant block diagonal matrix.
#[pyclass(
    name = "BlockSpec",
    module = "circrank",
    skip_from_py_object,
    frozen,
    eq,
    hash
)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyBlockSpec(core::BlockSpec);

#[pymethods]
impl PyBlockSpec {
    /// Accepts `"k;n1,n2,..."`, `"k1,k2;n1,n2"` or a list of `(n, k)` pairs.
    #[new]
    fn new(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        let parsed = if let Ok(s) = spec.extract::<String>() {
            core::BlockSpec::parse(&s)
        } else {
            core::BlockSpec::from_pairs(&spec.extract::<Vec<(usize, usize)>>()?)
        };
        parsed.map(PyBlockSpec).map_err(value_error)
    }

    #[getter]
    fn blocks(&self) -> Vec<(usize, usize)> {
        self.0.blocks().iter().map(|b| (b.n, b.k)).collect()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// The matrix, or its complement.
    #[pyo3(signature = (complement = false))]
    fn matrix(&self, complement: bool) -> PyMatrix {
        PyMatrix(core::certificates::spec_matrix(&self.0, complement))
    }

    /// Real rank from the closed form.
    #[pyo3(signature = (complement = false))]
    fn real_rank(&self, complement: bool) -> PyResult<usize> {
        core::rank::spec_real_rank(&self.0, complement).map_err(value_error)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("BlockSpec('{}')", self.0)
    }
}

/// Dense 0/1 matrix.
#[pyclass(name = "Matrix", module = "circrank", skip_from_py_object, frozen, eq)]
#[derive(Clone, PartialEq)]
struct PyMatrix(core::Matrix01);

#[pymethods]
impl PyMatrix {
    /// From rows given as bit strings or as sequences of 0/1 values.
    #[new]
    fn new(rows: &Bound<'_, PyAny>) -> PyResult<Self> {
        let strings: Vec<String> = match rows.extract::<Vec<String>>() {
            Ok(s) => s,
            Err(_) => rows
                .extract::<Vec<Vec<u8>>>()?
                .iter()
                .map(|r| r.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect())
                .collect(),
        };
        core::Matrix01::from_bit_strings(&strings)
            .map(PyMatrix)
            .map_err(value_error)
    }

    /// Parses the text or JSON file format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::Matrix01::parse_any(text)
            .map(PyMatrix)
            .map_err(value_error)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.n_rows(), self.0.n_cols())
    }

    fn rows(&self) -> Vec<String> {
        (0..self.0.n_rows()).map(|i| self.0.row_string(i)).collect()
    }

    fn __getitem__(&self, idx: (usize, usize)) -> PyResult<bool> {
        let (i, j) = idx;
        if i >= self.0.n_rows() || j >= self.0.n_cols() {
            return Err(PyIndexError::new_err("matrix index out of range"));
        }
        Ok(self.0.get(i, j))
    }

    fn complement(&self) -> Self {
        PyMatrix(core::complement(&self.0))
    }

    fn count_ones(&self) -> usize {
        self.0.count_ones()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{})", self.0.n_rows(), self.0.n_cols())
    }
}

/// Rectangles claimed to partition the ones of `target`.
#[pyclass(name = "Partition", module = "circrank", skip_from_py_object, frozen)]
#[derive(Clone)]
struct PyPartition(core::Partition);

#[pymethods]
impl PyPartition {
    #[new]
    fn new(target: &PyMatrix, rects: Vec<(Vec<usize>, Vec<usize>)>) -> Self {
        let rects = rects
            .into_iter()
            .map(|(r, c)| core::Rectangle::new(r, c))
            .collect();
        PyPartition(core::Partition::new(target.0.clone(), rects))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(PyPartition)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.0).expect("serializable")
    }

    #[getter]
    fn target(&self) -> PyMatrix {
        PyMatrix(self.0.target.clone())
    }

    #[getter]
    fn rects(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        self.0
            .rects
            .iter()
            .map(|r| (r.rows.clone(), r.cols.clone()))
            .collect()
    }

    /// None when valid, otherwise a description of the first fault.
    #[pyo3(signature = (matrix = None))]
    fn verify(&self, matrix: Option<&PyMatrix>) -> Option<String> {
        let mut p = self.0.clone();
        if let Some(m) = matrix {
            p.target = m.0.clone();
        }
        core::verify_partition(&p).err().map(|f| f.to_string())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyfunction]
fn real_rank(matrix: &PyMatrix) -> usize {
    core::real_rank(&matrix.0)
}

/// Real rank of `D_{n,k}` from the closed form.
#[pyfunction]
fn circulant_rank(n: usize, k: usize) -> PyResult<usize> {
    core::formula_rank_d(n, k).map_err(value_error)
}

/// Merged partition of the complement of `spec`'s matrix.
#[pyfunction]
fn construct(spec: &PyBlockSpec) -> PyResult<PyPartition> {
    core::complement_partition(&spec.0)
        .map(PyPartition)
        .map_err(value_error)
}

fn search_config(budget: Option<f64>, threads: usize) -> core::SearchConfig {
    core::SearchConfig {
        time_budget: budget.map(Duration::from_secs_f64),
        threads,
        ..Default::default()
    }
}

/// `{"exact", "lower", "upper", "witness"}`; `exact` is None when the budget
/// (seconds) ran out first.
#[pyfunction]
#[pyo3(signature = (matrix, budget = None, threads = 0))]
fn binary_rank<'py>(
    py: Python<'py>,
    matrix: &PyMatrix,
    budget: Option<f64>,
    threads: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = search_config(budget, threads);
    let m = matrix.0.clone();
    let out = py
        .detach(|| core::binary_rank_exact(&m, &cfg))
        .map_err(value_error)?;
    let dict = to_py(py, &out)?;
    dict.del_item("nodes")?;
    dict.del_item("timed_out")?;
    dict.set_item("witness", PyPartition(out.witness).into_pyobject(py)?)?;
    Ok(dict)
}

/// Real rank, closed-form bounds and, with `search`, solver bounds.
#[pyfunction]
#[pyo3(signature = (spec, complement = true, search = false, budget = None, threads = 0))]
fn certify<'py>(
    py: Python<'py>,
    spec: &PyBlockSpec,
    complement: bool,
    search: bool,
    budget: Option<f64>,
    threads: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = search_config(budget, threads);
    let s = spec.0.clone();
    let report = py
        .detach(|| core::certify(&s, complement, search.then_some(&cfg)))
        .map_err(value_error)?;
    to_py(py, &report)
}

/// `{"sizes", "row_perm", "col_perm"}` for a 2-regular matrix.
#[pyfunction]
fn canonicalize<'py>(py: Python<'py>, matrix: &PyMatrix) -> PyResult<Bound<'py, PyAny>> {
    let form = core::canonicalize_2regular(&matrix.0).map_err(value_error)?;
    to_py(py, &form)
}

#[pymodule]
fn circrank(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBlockSpec>()?;
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyPartition>()?;
    m.add_function(wrap_pyfunction!(real_rank, m)?)?;
    m.add_function(wrap_pyfunction!(circulant_rank, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(binary_rank, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize, m)?)?;
    Ok(())
}
