use etas_core::factor_nig::{self, correlation_curve, time_grid};
use etas_core::input::{parse_input, Input, InputError};
use etas_core::montecarlo::{run_model_checks, sample_subordinator_at, sample_y_rho_at, McConfig, SampleMatrix};
use etas_core::{Atom, EtasDistribution, NigMarginal, RhoFactorModel, SatoLaw};
use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("rho must be a square matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn sample_rows(s: &SampleMatrix) -> Vec<Vec<f64>> {
    s.iter_rows().map(<[f64]>::to_vec).collect()
}

/// Exponentially tilted alpha-stable law with finitely many atoms, each
/// given as `(direction, beta, lambda)`.
#[pyclass(name = "EtasDistribution", module = "etas", frozen)]
struct PyEtasDistribution(EtasDistribution);

#[pymethods]
impl PyEtasDistribution {
    #[new]
    fn new(alpha: f64, atoms: Vec<(Vec<f64>, f64, f64)>) -> PyResult<Self> {
        let atoms = atoms.into_iter().map(|(w, beta, lambda)| Atom::new(w, beta, lambda)).collect();
        EtasDistribution::new(alpha, atoms).map(Self).map_err(value_error)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn atoms(&self) -> Vec<(Vec<f64>, f64, f64)> {
        self.0.atoms().iter().map(|a| (a.direction.clone(), a.tempering, a.mass)).collect()
    }

    fn char_exponent(&self, z: Vec<f64>) -> PyResult<Complex64> {
        self.check_dim(&z)?;
        Ok(self.0.char_exponent(&z))
    }

    fn char_function(&self, z: Vec<f64>) -> PyResult<Complex64> {
        self.check_dim(&z)?;
        Ok(self.0.char_function(&z))
    }

    /// Returns `(mean, covariance)`.
    fn mean_and_covariance(&self) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
        let mc = self.0.mean_and_covariance().map_err(value_error)?;
        Ok((mc.mean.iter().copied().collect(), matrix_rows(&mc.covariance)))
    }

    fn moment_exists(&self, k: f64) -> bool {
        self.0.moment_exists(k)
    }

    fn levy_radial_density(&self, atom_index: usize, r: f64) -> PyResult<f64> {
        self.0.levy_radial_density(atom_index, r).map_err(value_error)
    }

    fn convolve(&self, other: &Self) -> PyResult<Self> {
        self.0.convolve(&other.0).map(Self).map_err(value_error)
    }

    fn scale(&self, c: f64) -> PyResult<Self> {
        self.0.scale(c).map(Self).map_err(value_error)
    }

    fn support_predicates<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = self.0.support_predicates();
        let d = PyDict::new(py);
        d.set_item("independent_components", p.independent_components)?;
        d.set_item("full_dimensional", p.full_dimensional)?;
        d.set_item("positive_orthant", p.positive_orthant)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("EtasDistribution(alpha={}, atoms={})", self.0.alpha(), self.0.atoms().len())
    }
}

impl PyEtasDistribution {
    fn check_dim(&self, z: &[f64]) -> PyResult<()> {
        if z.len() == self.0.dim() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("expected {} coordinates, got {}", self.0.dim(), z.len())))
        }
    }
}

/// Self-similar additive process built from a self-decomposable base law.
#[pyclass(name = "SatoLaw", module = "etas", frozen)]
struct PySatoLaw(SatoLaw);

#[pymethods]
impl PySatoLaw {
    #[new]
    fn new(base: &PyEtasDistribution, q: f64) -> PyResult<Self> {
        SatoLaw::new(base.0.clone(), q).map(Self).map_err(value_error)
    }

    #[getter]
    fn q(&self) -> f64 {
        self.0.q()
    }

    #[getter]
    fn base(&self) -> PyEtasDistribution {
        PyEtasDistribution(self.0.base().clone())
    }

    fn char_exponent(&self, t: f64, z: Vec<f64>) -> PyResult<Complex64> {
        self.0.char_exponent(t, &z).map_err(value_error)
    }

    fn cf(&self, t: f64, z: Vec<f64>) -> PyResult<Complex64> {
        self.0.cf(t, &z).map_err(value_error)
    }

    fn time_t_levy_radial(&self, t: f64, atom_index: usize, r: f64) -> PyResult<f64> {
        self.0.time_t_levy_radial(t, atom_index, r).map_err(value_error)
    }

    fn differential_levy_radial(&self, u: f64, atom_index: usize, r: f64) -> PyResult<f64> {
        self.0.differential_levy_radial(u, atom_index, r).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("SatoLaw(q={}, dim={})", self.0.q(), self.0.dim())
    }
}

#[pyclass(name = "NigMarginal", module = "etas", frozen, from_py_object)]
#[derive(Clone)]
struct PyNigMarginal(NigMarginal);

#[pymethods]
impl PyNigMarginal {
    #[new]
    fn new(gamma: f64, beta: f64, delta: f64) -> PyResult<Self> {
        NigMarginal::new(gamma, beta, delta).map(Self).map_err(value_error)
    }

    /// One of the fitted index marginals, by name.
    #[staticmethod]
    fn msci(name: &str) -> PyResult<Self> {
        factor_nig::msci_marginal(name)
            .map(Self)
            .ok_or_else(|| PyValueError::new_err(format!("unknown marginal {name:?}")))
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta
    }

    #[getter]
    fn zeta(&self) -> f64 {
        self.0.zeta()
    }

    #[getter]
    fn drift(&self) -> f64 {
        self.0.drift()
    }

    #[getter]
    fn vol(&self) -> f64 {
        self.0.vol()
    }

    fn __repr__(&self) -> String {
        format!("NigMarginal(gamma={}, beta={}, delta={})", self.0.gamma, self.0.beta, self.0.delta)
    }
}

/// Sato-subordinated Brownian motion with NIG marginals and a common
/// factor with correlation matrix `rho`.
#[pyclass(name = "RhoFactorModel", module = "etas", frozen)]
struct PyRhoFactorModel(RhoFactorModel);

#[pymethods]
impl PyRhoFactorModel {
    #[new]
    fn new(marginals: Vec<PyNigMarginal>, a: f64, rho: Vec<Vec<f64>>, q: f64) -> PyResult<Self> {
        let marginals = marginals.into_iter().map(|m| m.0).collect();
        RhoFactorModel::new(marginals, a, rows_to_matrix(&rho)?, q).map(Self).map_err(value_error)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn q(&self) -> f64 {
        self.0.q()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn rho(&self) -> Vec<Vec<f64>> {
        matrix_rows(self.0.rho())
    }

    #[getter]
    fn marginals(&self) -> Vec<PyNigMarginal> {
        self.0.marginals().iter().cloned().map(PyNigMarginal).collect()
    }

    fn cf(&self, t: f64, z: Vec<f64>) -> PyResult<Complex64> {
        self.0.cf(t, &z).map_err(value_error)
    }

    fn subordinator(&self) -> PyResult<PySatoLaw> {
        self.0.subordinator().map(PySatoLaw).map_err(value_error)
    }

    /// `(mean, variance)` of each return coordinate at time `t`.
    fn return_moments(&self, t: f64) -> PyResult<Vec<(f64, f64)>> {
        let m = self.0.return_moments(t).map_err(value_error)?;
        Ok(m.iter().map(|x| (x.mean, x.variance)).collect())
    }

    #[pyo3(signature = (t, h=0, j=1))]
    fn correlation(&self, t: f64, h: usize, j: usize) -> PyResult<f64> {
        factor_nig::correlation(&self.0, t, h, j).map_err(value_error)
    }

    /// `(limit_zero, limit_infinity)`.
    #[pyo3(signature = (h=0, j=1))]
    fn correlation_limits(&self, h: usize, j: usize) -> PyResult<(f64, f64)> {
        let l = factor_nig::correlation_limits(&self.0, h, j).map_err(value_error)?;
        Ok((l.limit_zero, l.limit_infinity))
    }

    /// `(times, values)` on a log-spaced (or linear) grid.
    #[pyo3(signature = (t_min=1e-3, t_max=1109.0, points=200, h=0, j=1, linear=false))]
    fn correlation_curve(
        &self,
        t_min: f64,
        t_max: f64,
        points: usize,
        h: usize,
        j: usize,
        linear: bool,
    ) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let times = time_grid(t_min, t_max, points, linear).map_err(value_error)?;
        let curve = correlation_curve(&self.0, h, j, &times).map_err(value_error)?;
        Ok((curve.times, curve.values))
    }

    #[pyo3(signature = (t, samples, seed=42, workers=1))]
    fn sample_returns(&self, py: Python<'_>, t: f64, samples: usize, seed: u64, workers: usize) -> PyResult<Vec<Vec<f64>>> {
        let config = McConfig::new(samples, seed, workers).map_err(value_error)?;
        let s = py.detach(|| sample_y_rho_at(&self.0, t, &config)).map_err(value_error)?;
        Ok(sample_rows(&s))
    }

    #[pyo3(signature = (t, samples, seed=42, workers=1))]
    fn sample_subordinator(&self, py: Python<'_>, t: f64, samples: usize, seed: u64, workers: usize) -> PyResult<Vec<Vec<f64>>> {
        let config = McConfig::new(samples, seed, workers).map_err(value_error)?;
        let s = py.detach(|| sample_subordinator_at(&self.0, t, &config)).map_err(value_error)?;
        Ok(sample_rows(&s))
    }

    /// Runs the Monte Carlo checks and returns
    /// `(passed, [(name, t, estimate, standard_error, reference, passed)])`.
    #[pyo3(signature = (times, samples=1_000_000, seed=42, workers=1))]
    fn mc_check(
        &self,
        py: Python<'_>,
        times: Vec<f64>,
        samples: usize,
        seed: u64,
        workers: usize,
    ) -> PyResult<(bool, Vec<(String, f64, f64, f64, f64, bool)>)> {
        let config = McConfig::new(samples, seed, workers).map_err(value_error)?;
        let report = py.detach(|| run_model_checks(&self.0, &times, &config)).map_err(value_error)?;
        let checks = report
            .checks
            .iter()
            .map(|c| (c.name.clone(), c.t, c.estimate, c.standard_error, c.reference, c.passed))
            .collect();
        Ok((report.passed(), checks))
    }

    fn __repr__(&self) -> String {
        format!("RhoFactorModel(dim={}, a={}, q={})", self.0.dim(), self.0.a(), self.0.q())
    }
}

#[pyfunction]
fn a_max(marginals: Vec<PyNigMarginal>) -> f64 {
    let m: Vec<NigMarginal> = marginals.into_iter().map(|m| m.0).collect();
    factor_nig::a_max(&m)
}

/// Parses a JSON document into whichever of the three types it describes.
#[pyfunction]
fn from_json(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let input = parse_input(text).map_err(|e| match e {
        InputError::Parse(msg) => PyValueError::new_err(msg),
        InputError::Invalid(_, v) => value_error(v),
    })?;
    Ok(match input {
        Input::Distribution(d) => Py::new(py, PyEtasDistribution(d))?.into_any(),
        Input::Sato(s) => Py::new(py, PySatoLaw(s))?.into_any(),
        Input::Model(m) => Py::new(py, PyRhoFactorModel(m))?.into_any(),
    })
}

#[pymodule]
fn etas(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEtasDistribution>()?;
    m.add_class::<PySatoLaw>()?;
    m.add_class::<PyNigMarginal>()?;
    m.add_class::<PyRhoFactorModel>()?;
    m.add_function(wrap_pyfunction!(a_max, m)?)?;
    m.add_function(wrap_pyfunction!(from_json, m)?)?;
    Ok(())
}
