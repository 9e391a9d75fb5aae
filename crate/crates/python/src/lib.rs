//! Python bindings for `dualmds`.
//!
//! Matrices cross the boundary as lists of row lists of floats. Domain
//! errors raise `ValueError`, non-Euclidean inputs raise `ArithmeticError`
//! and size limits raise `MemoryError`.

use dualmds::nalgebra::DMatrix;
use dualmds::{basis, mds, nearness, pairspace, stability, verify, Error};
use pyo3::exceptions::{PyArithmeticError, PyIOError, PyMemoryError, PyValueError};
use pyo3::prelude::*;

type Rows = Vec<Vec<f64>>;

fn to_py_err(err: Error) -> PyErr {
    let msg = err.to_string();
    match err {
        Error::NonEuclidean { .. } => PyArithmeticError::new_err(msg),
        Error::Resource { .. } => PyMemoryError::new_err(msg),
        Error::Io(_) => PyIOError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

/// Converts row lists into a dense matrix, rejecting ragged input.
pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(format!("row {bad} has {} entries, expected {ncols}", rows[bad].len()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix_arg(rows: Rows) -> PyResult<DMatrix<f64>> {
    rows_to_matrix(&rows).map_err(PyValueError::new_err)
}

fn distances_arg(rows: Rows) -> PyResult<pairspace::SquaredDistanceMatrix> {
    pairspace::SquaredDistanceMatrix::new(matrix_arg(rows)?).map_err(to_py_err)
}

fn points_arg(rows: Rows) -> PyResult<pairspace::PointConfiguration> {
    pairspace::PointConfiguration::new(matrix_arg(rows)?).map_err(to_py_err)
}

/// An unordered pair `{i, j}` of 1-based point labels with `i < j <= n`.
#[pyclass(name = "PairIndex", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyPairIndex(pairspace::PairIndex);

#[pymethods]
impl PyPairIndex {
    #[new]
    fn new(i: usize, j: usize, n: usize) -> PyResult<Self> {
        pairspace::PairIndex::new(i, j, n).map(Self).map_err(to_py_err)
    }

    #[staticmethod]
    fn from_linear(k: usize, n: usize) -> PyResult<Self> {
        pairspace::linear_to_pair(k, n).map(Self).map_err(to_py_err)
    }

    #[getter]
    fn i(&self) -> usize {
        self.0.i()
    }

    #[getter]
    fn j(&self) -> usize {
        self.0.j()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// 1-based position in lexicographic pair order.
    fn linear(&self) -> usize {
        self.0.linear()
    }

    fn shares_vertex(&self, other: &Self) -> bool {
        self.0.shares_vertex(&other.0)
    }

    fn __repr__(&self) -> String {
        format!("PairIndex({}, {}, n={})", self.0.i(), self.0.j(), self.0.n())
    }
}

#[pyclass(name = "EmbeddingResult", frozen, get_all)]
pub struct PyEmbeddingResult {
    points: Rows,
    retained_eigenvalues: Vec<f64>,
    discarded_mass: f64,
    rank: usize,
    min_eigenvalue: f64,
    padded_dims: usize,
}

#[pymethods]
impl PyEmbeddingResult {
    fn __repr__(&self) -> String {
        format!(
            "EmbeddingResult(n={}, dim={}, rank={}, padded_dims={})",
            self.points.len(),
            self.points.first().map_or(0, Vec::len),
            self.rank,
            self.padded_dims
        )
    }
}

#[pyclass(name = "StabilityReport", frozen, get_all)]
pub struct PyStabilityReport {
    n: usize,
    dim: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
    max_ratio: f64,
    amplification_factor: f64,
    bound: f64,
    passed: bool,
}

#[pymethods]
impl PyStabilityReport {
    fn __repr__(&self) -> String {
        format!(
            "StabilityReport(n={}, max_ratio={:.6}, factor={:.6}, passed={})",
            self.n,
            self.max_ratio,
            self.amplification_factor,
            if self.passed { "True" } else { "False" }
        )
    }
}

impl From<stability::StabilityReport> for PyStabilityReport {
    fn from(r: stability::StabilityReport) -> Self {
        Self {
            n: r.n,
            dim: r.dim,
            epsilon: r.epsilon,
            trials: r.trials,
            seed: r.seed,
            max_ratio: r.max_ratio,
            amplification_factor: r.amplification_factor,
            bound: r.bound,
            passed: r.pass,
        }
    }
}

#[pyfunction]
fn pair_count(n: usize) -> usize {
    pairspace::pair_count(n)
}

#[pyfunction]
fn squared_distances(points: Rows) -> PyResult<Rows> {
    Ok(matrix_to_rows(mds::squared_distances(&points_arg(points)?).entries()))
}

#[pyfunction]
fn double_center(d: Rows) -> PyResult<Rows> {
    Ok(matrix_to_rows(mds::double_center(&distances_arg(d)?).entries()))
}

/// Gram matrix assembled as `sum_{i<j} D_ij v_ij` over dual atoms.
#[pyfunction]
fn dual_expansion(d: Rows) -> PyResult<Rows> {
    Ok(matrix_to_rows(mds::dual_expansion(&distances_arg(d)?).entries()))
}

/// Returns `(euclidean, min_eigenvalue, max_eigenvalue)`.
#[pyfunction]
#[pyo3(signature = (d, tol = 1e-8))]
fn is_euclidean(d: Rows, tol: f64) -> PyResult<(bool, f64, f64)> {
    let t = mds::is_euclidean(&distances_arg(d)?, tol);
    Ok((t.euclidean, t.min_eigenvalue, t.max_eigenvalue))
}

#[pyfunction]
#[pyo3(signature = (d, dim = None, tol = 1e-8))]
fn embed(d: Rows, dim: Option<usize>, tol: f64) -> PyResult<PyEmbeddingResult> {
    let e = mds::embed(&distances_arg(d)?, dim, tol).map_err(to_py_err)?;
    Ok(PyEmbeddingResult {
        points: matrix_to_rows(e.points.points()),
        retained_eigenvalues: e.retained_eigenvalues,
        discarded_mass: e.discarded_mass,
        rank: e.rank,
        min_eigenvalue: e.min_eigenvalue,
        padded_dims: e.padded_dims,
    })
}

#[pyfunction]
fn procrustes_residual(p: Rows, q: Rows) -> PyResult<f64> {
    mds::procrustes_residual(&points_arg(p)?, &points_arg(q)?).map_err(to_py_err)
}

/// Integer inner-product matrix of the basis atoms.
#[pyfunction]
fn basis_gram(n: usize) -> PyResult<Vec<Vec<i64>>> {
    let h = basis::basis_gram(n).map_err(to_py_err)?;
    Ok(h.entries().row_iter().map(|r| r.iter().copied().collect()).collect())
}

#[pyfunction]
fn dual_gram(n: usize) -> PyResult<Rows> {
    basis::dual_gram(n).map(|m| matrix_to_rows(&m)).map_err(to_py_err)
}

/// Predicted `(eigenvalue, multiplicity)` groups of the basis inner-product matrix.
#[pyfunction]
fn h_spectrum(n: usize) -> PyResult<Vec<(f64, usize)>> {
    basis::h_spectrum_predicted(n).map_err(to_py_err)
}

#[pyfunction]
fn amplification_factor(n: usize) -> PyResult<f64> {
    stability::amplification_factor(n).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (n, dim = 2, epsilon = 1e-3, trials = 1000, seed = 0))]
fn noise_experiment(
    py: Python<'_>,
    n: usize,
    dim: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> PyResult<PyStabilityReport> {
    py.detach(|| stability::noise_experiment(n, dim, epsilon, trials, seed))
        .map(Into::into)
        .map_err(to_py_err)
}

/// Sparse triangle-inequality constraint matrix as 1-based `(row, col, sign)` triplets.
#[pyfunction]
fn constraint_triplets(n: usize) -> PyResult<Vec<(usize, usize, i64)>> {
    let a = nearness::constraint_matrix(n).map_err(to_py_err)?;
    Ok(a.triplets().into_iter().map(|t| (t.row, t.col, t.sign)).collect())
}

/// Runs the identity checks for `n` points; returns `(name, passed)` pairs.
#[pyfunction]
fn run_checks(n: usize) -> PyResult<Vec<(String, bool)>> {
    let checks = verify::verify(n).map_err(to_py_err)?;
    Ok(checks.into_iter().map(|c| (c.name.to_string(), c.pass)).collect())
}

#[pymodule]
pub fn dualmds_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPairIndex>()?;
    m.add_class::<PyEmbeddingResult>()?;
    m.add_class::<PyStabilityReport>()?;
    m.add_function(wrap_pyfunction!(pair_count, m)?)?;
    m.add_function(wrap_pyfunction!(squared_distances, m)?)?;
    m.add_function(wrap_pyfunction!(double_center, m)?)?;
    m.add_function(wrap_pyfunction!(dual_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(is_euclidean, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(procrustes_residual, m)?)?;
    m.add_function(wrap_pyfunction!(basis_gram, m)?)?;
    m.add_function(wrap_pyfunction!(dual_gram, m)?)?;
    m.add_function(wrap_pyfunction!(h_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(amplification_factor, m)?)?;
    m.add_function(wrap_pyfunction!(noise_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(constraint_triplets, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
