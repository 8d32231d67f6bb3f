//! Python bindings: the main state/geometry types and the scan-level
//! operations, with matrices passed as nested lists of complex numbers.

use interfgeo::bandmodels;
use interfgeo::geometry;
use interfgeo::interferometer;
use interfgeo::numerics::{self, CMatrix};
use interfgeo::pullback;
use interfgeo::states::{self, MixedState, DEFAULT_EPS_DEG, DEFAULT_EPS_ZERO};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

type Matrix = Vec<Vec<Complex64>>;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_cmatrix(rows: &Matrix) -> PyResult<CMatrix> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(PyValueError::new_err("matrix must be non-empty"));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("matrix rows have unequal lengths"));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

fn from_cmatrix(m: &CMatrix) -> Matrix {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn model_by_name(name: &str) -> PyResult<bandmodels::TwoBandModel> {
    bandmodels::by_name(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown model {name:?} (built-ins: dirac)")))
}

/// Validated density matrix.
#[pyclass(name = "MixedState", frozen)]
struct PyMixedState {
    inner: MixedState,
}

#[pymethods]
impl PyMixedState {
    #[new]
    fn new(matrix: Matrix) -> PyResult<Self> {
        let inner = MixedState::new(to_cmatrix(&matrix)?).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Thermal state exp(-beta H)/Z of a Hermitian Hamiltonian.
    #[staticmethod]
    fn gibbs(hamiltonian: Matrix, beta: f64) -> PyResult<Self> {
        let h = to_cmatrix(&hamiltonian)?;
        let inner = states::gibbs(&h, beta).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Matrix {
        from_cmatrix(self.inner.matrix())
    }

    /// Type tuple (block ranks, ascending) of the spectral decomposition.
    #[pyo3(signature = (eps_deg=DEFAULT_EPS_DEG, eps_zero=DEFAULT_EPS_ZERO))]
    fn tau(&self, eps_deg: f64, eps_zero: f64) -> PyResult<Vec<usize>> {
        let d = states::decompose(&self.inner, eps_deg, eps_zero).map_err(value_err)?;
        Ok(d.tau())
    }

    /// Block eigenvalues in decreasing order.
    #[pyo3(signature = (eps_deg=DEFAULT_EPS_DEG, eps_zero=DEFAULT_EPS_ZERO))]
    fn block_probabilities(&self, eps_deg: f64, eps_zero: f64) -> PyResult<Vec<f64>> {
        let d = states::decompose(&self.inner, eps_deg, eps_zero).map_err(value_err)?;
        Ok(d.blocks().iter().map(|b| b.probability()).collect())
    }

    fn tensor(&self, other: &PyMixedState) -> Self {
        Self {
            inner: self.inner.tensor(&other.inner),
        }
    }
}

/// Overflow-safe (1/(cosh x + 1), cosh x/(cosh x + 1)).
#[pyfunction]
fn thermal_factors(x: f64) -> (f64, f64) {
    numerics::thermal_factors(x)
}

/// Sum of singular values.
#[pyfunction]
fn nuclear_norm(matrix: Matrix) -> PyResult<f64> {
    Ok(numerics::nuclear_norm(&to_cmatrix(&matrix)?))
}

/// Hermitian eigendecomposition: (ascending eigenvalues, eigenvector columns).
#[pyfunction]
fn eigh(matrix: Matrix) -> PyResult<(Vec<f64>, Matrix)> {
    let r = numerics::eigh(&to_cmatrix(&matrix)?).map_err(value_err)?;
    Ok((r.eigenvalues, from_cmatrix(&r.eigenvectors)))
}

/// Interferometric distance between same-type states.
#[pyfunction]
#[pyo3(signature = (rho, sigma, eps_deg=DEFAULT_EPS_DEG, eps_zero=DEFAULT_EPS_ZERO))]
fn dist_base(
    rho: &PyMixedState,
    sigma: &PyMixedState,
    eps_deg: f64,
    eps_zero: f64,
) -> PyResult<f64> {
    geometry::dist_base(&rho.inner, &sigma.inner, eps_deg, eps_zero).map_err(value_err)
}

/// Sampling oracle for the gauge infimum behind `dist_base`.
#[pyfunction]
#[pyo3(signature = (rho, sigma, samples=2000, seed=0))]
fn dist_base_bruteforce(
    rho: &PyMixedState,
    sigma: &PyMixedState,
    samples: usize,
    seed: u64,
) -> PyResult<f64> {
    geometry::dist_base_bruteforce(&rho.inner, &sigma.inner, samples, seed).map_err(value_err)
}

/// Constructive-port probability of the balanced Mach-Zehnder.
#[pyfunction]
fn port_probability(rho: &PyMixedState, u: Matrix, v: Matrix) -> PyResult<f64> {
    let setup = interferometer::InterferometerSetup::new(
        rho.inner.clone(),
        to_cmatrix(&u)?,
        to_cmatrix(&v)?,
    )
    .map_err(value_err)?;
    Ok(interferometer::port_probability(&setup))
}

/// Optimal arm-0 gauge: returns (pr_max, V_opt).
#[pyfunction]
#[pyo3(signature = (rho, u, eps_deg=DEFAULT_EPS_DEG, eps_zero=DEFAULT_EPS_ZERO))]
fn max_port_probability(
    rho: &PyMixedState,
    u: Matrix,
    eps_deg: f64,
    eps_zero: f64,
) -> PyResult<(f64, Matrix)> {
    let (pr, v) =
        interferometer::max_port_probability(&rho.inner, &to_cmatrix(&u)?, eps_deg, eps_zero)
            .map_err(value_err)?;
    Ok((pr, from_cmatrix(&v)))
}

/// Closed-form pullback integrands at one (k, M): returns
/// (interferometric, Bures, Fubini-Study).
#[pyfunction]
fn integrands(model: &str, k: Vec<f64>, m: f64, beta: f64) -> PyResult<(f64, f64, f64)> {
    let model = model_by_name(model)?;
    let bp = bandmodels::bloch_point(&model, &k, m).map_err(value_err)?;
    Ok((
        pullback::interf_integrand(&bp, beta),
        pullback::bures_integrand(&bp, beta),
        pullback::fubini_study_integrand(&bp),
    ))
}

/// Lattice Chern number of the occupied band.
#[pyfunction]
fn chern_number(model: &str, m: f64, n: usize) -> PyResult<i64> {
    pullback::chern_number(&model_by_name(model)?, m, n).map_err(value_err)
}

/// Scan the metric pullbacks over (M, T) cells; returns a list of dicts
/// mirroring the CLI's CSV columns.
#[pyfunction]
fn metric_scan(
    py: Python<'_>,
    model: &str,
    m_values: Vec<f64>,
    t_values: Vec<f64>,
    n: usize,
) -> PyResult<Py<PyList>> {
    let samples = pullback::metric_scan(&model_by_name(model)?, &m_values, &t_values, n);
    let list = PyList::empty(py);
    for s in &samples {
        let row = PyDict::new(py);
        row.set_item("M", s.m)?;
        row.set_item("T", s.t)?;
        row.set_item("g_interf_classical", s.g_interf.classical)?;
        row.set_item("g_interf_quantum", s.g_interf.quantum)?;
        row.set_item("g_interf_total", s.g_interf.total)?;
        row.set_item("g_bures_classical", s.g_bures.classical)?;
        row.set_item("g_bures_quantum", s.g_bures.quantum)?;
        row.set_item("g_bures_total", s.g_bures.total)?;
        row.set_item("g_fs", s.g_fs)?;
        row.set_item("gapless_cells", s.gapless_cells)?;
        list.append(row)?;
    }
    Ok(list.into())
}

#[pymodule]
fn interfgeo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMixedState>()?;
    m.add_function(wrap_pyfunction!(thermal_factors, m)?)?;
    m.add_function(wrap_pyfunction!(nuclear_norm, m)?)?;
    m.add_function(wrap_pyfunction!(eigh, m)?)?;
    m.add_function(wrap_pyfunction!(dist_base, m)?)?;
    m.add_function(wrap_pyfunction!(dist_base_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(port_probability, m)?)?;
    m.add_function(wrap_pyfunction!(max_port_probability, m)?)?;
    m.add_function(wrap_pyfunction!(integrands, m)?)?;
    m.add_function(wrap_pyfunction!(chern_number, m)?)?;
    m.add_function(wrap_pyfunction!(metric_scan, m)?)?;
    Ok(())
}
