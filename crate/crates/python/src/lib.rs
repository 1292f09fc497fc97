//! Python bindings for `wegner-core`.
//!
//! Matrices and spectra cross the boundary as plain lists of floats;
//! structured results (experiment rows, fits, suite reports) come back as
//! dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use wegner_core::experiment::{run, write_results_csv, ExperimentConfig};
use wegner_core::spectral::{count_below, dist_to_spectrum, resolvent_norm, Spectrum};
use wegner_core::tensor::sumset_spectrum;
use wegner_core::transfer;
use wegner_core::verify::{verify as run_suites, Suite, VerifyOptions};
use wegner_core::wegner::{self, Interval, MCResult};
use wegner_core::{build_hamiltonian, sample_field, DistributionSpec, Error, InteractionSpec, Site, SymMatrix};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Capacity { .. } | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for Result<T, Error> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Serialize through JSON into native Python objects.
fn to_python<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn spectrum(values: Vec<f64>) -> PyResult<Spectrum> {
    Spectrum::new(values).py()
}

fn interval(lo: f64, hi: f64) -> PyResult<Interval> {
    Interval::new(lo, hi).py()
}

/// An `n`-particle cube of radius `radius` in `Z^d`.
#[pyclass(name = "Cube", module = "wegner_py", frozen)]
struct PyCube {
    inner: wegner_core::Cube,
}

#[pymethods]
impl PyCube {
    #[new]
    #[pyo3(signature = (n, d, radius, center=None))]
    fn new(n: usize, d: usize, radius: u32, center: Option<Vec<i64>>) -> PyResult<Self> {
        let site = match center {
            Some(c) => Site::new(n, d, c),
            None => Site::origin(n, d),
        }
        .py()?;
        Ok(Self { inner: wegner_core::Cube::new(site, radius) })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn radius(&self) -> u32 {
        self.inner.radius()
    }

    #[getter]
    fn center(&self) -> Vec<i64> {
        self.inner.center().coords().to_vec()
    }

    fn site_count(&self) -> usize {
        self.inner.site_count()
    }

    /// Sites in matrix-basis order, each as a flat coordinate list.
    fn sites(&self) -> Vec<Vec<i64>> {
        self.inner.sites().map(|s| s.coords().to_vec()).collect()
    }

    fn index_of(&self, coords: Vec<i64>) -> PyResult<Option<usize>> {
        let site = Site::new(self.inner.n(), self.inner.d(), coords).py()?;
        Ok(self.inner.index_of(&site))
    }

    fn single_particle_points(&self) -> Vec<Vec<i64>> {
        self.inner.single_particle_points()
    }

    fn __repr__(&self) -> String {
        format!(
            "Cube(n={}, d={}, radius={}, center={:?})",
            self.inner.n(),
            self.inner.d(),
            self.inner.radius(),
            self.inner.center().coords()
        )
    }
}

/// Single-site disorder law.
#[pyclass(name = "Distribution", module = "wegner_py", frozen)]
struct PyDistribution {
    inner: DistributionSpec,
}

#[pymethods]
impl PyDistribution {
    /// Value `hi` with probability `p`, `lo` otherwise.
    #[staticmethod]
    #[pyo3(signature = (p=0.5, lo=0.0, hi=1.0))]
    fn bernoulli(p: f64, lo: f64, hi: f64) -> PyResult<Self> {
        Self::checked(DistributionSpec::Bernoulli { p, lo, hi })
    }

    #[staticmethod]
    fn uniform(lo: f64, hi: f64) -> PyResult<Self> {
        Self::checked(DistributionSpec::Uniform { lo, hi })
    }

    #[staticmethod]
    fn finite(values: Vec<f64>, weights: Vec<f64>) -> PyResult<Self> {
        Self::checked(DistributionSpec::Finite { values, weights })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Self::checked(inner)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn support_bounds(&self) -> (f64, f64) {
        self.inner.support_bounds()
    }

    /// Field values on `points` for one `(seed, trial)`.
    #[pyo3(signature = (points, seed, trial=0))]
    fn sample(&self, points: Vec<Vec<i64>>, seed: u64, trial: u64) -> PyResult<Vec<f64>> {
        let field = sample_field(&self.inner, points.iter().map(Vec::as_slice), seed, trial).py()?;
        points.iter().map(|p| field.value(p).py()).collect()
    }

    fn __repr__(&self) -> String {
        format!("Distribution({})", serde_json::to_string(&self.inner).unwrap_or_default())
    }
}

impl PyDistribution {
    fn checked(inner: DistributionSpec) -> PyResult<Self> {
        wegner_core::validate(&inner).map_err(|v| py_err(v.into()))?;
        Ok(Self { inner })
    }
}

/// A finite-volume Hamiltonian `-Δ + V + hU`.
#[pyclass(name = "Hamiltonian", module = "wegner_py", frozen)]
struct PyHamiltonian {
    inner: SymMatrix,
}

#[pymethods]
impl PyHamiltonian {
    /// Assemble on `cube` with a field drawn from `distribution` at
    /// `(seed, trial)`. `pair_range` switches on the contact interaction
    /// `amplitude · #{i<j : |x_i - x_j| <= pair_range}`.
    #[new]
    #[pyo3(signature = (cube, distribution, seed, trial=0, h=0.0, pair_range=None, amplitude=1.0))]
    fn new(
        cube: &PyCube,
        distribution: &PyDistribution,
        seed: u64,
        trial: u64,
        h: f64,
        pair_range: Option<u32>,
        amplitude: f64,
    ) -> PyResult<Self> {
        let pts = cube.inner.single_particle_points();
        let field = sample_field(&distribution.inner, pts.iter().map(Vec::as_slice), seed, trial).py()?;
        let inter = match pair_range {
            Some(range) => InteractionSpec::PairContact { range, amplitude },
            None => InteractionSpec::None,
        };
        Ok(Self { inner: build_hamiltonian(&cube.inner, &field, &inter, h).py()? })
    }

    /// From a dense, exactly symmetric list of rows.
    #[staticmethod]
    fn from_dense(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self { inner: SymMatrix::from_dense(&rows).py()? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.inner.dim() || j >= self.inner.dim() {
            return Err(PyValueError::new_err(format!("index ({i}, {j}) out of range")));
        }
        Ok(self.inner.get(i, j))
    }

    fn to_dense(&self) -> Vec<Vec<f64>> {
        let m = self.inner.to_dense();
        (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
    }

    /// All eigenvalues, ascending.
    fn spectrum(&self, py: Python<'_>) -> PyResult<Vec<f64>> {
        let m = &self.inner;
        py.detach(|| wegner_core::full_spectrum(m)).py().map(Spectrum::into_vec)
    }

    fn count_below(&self, e: f64) -> usize {
        count_below(&self.inner, e).count
    }

    fn dist(&self, e: f64) -> PyResult<f64> {
        dist_to_spectrum(&self.inner, e).py()
    }

    /// `‖(H - E)⁻¹‖`, or `None` at an eigenvalue.
    fn resolvent_norm(&self, e: f64) -> PyResult<Option<f64>> {
        resolvent_norm(&self.inner, e).py()
    }

    /// The `# dim N` / `i j value` text dump.
    fn dump(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_dump(&mut buf).py()?;
        String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian({})", wegner_core::hamiltonian::describe(&self.inner))
    }
}

/// Sorted sums `λ1 + … + λn` over one eigenvalue from each list.
#[pyfunction]
fn sumset(spectra: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let terms = spectra.into_iter().map(spectrum).collect::<PyResult<Vec<_>>>()?;
    Ok(sumset_spectrum(&terms).py()?.sums().eigenvalues().to_vec())
}

#[pyfunction]
fn fixed_energy_event(eigenvalues: Vec<f64>, energy: f64, eps: f64) -> PyResult<bool> {
    Ok(wegner::fixed_energy_event(&spectrum(eigenvalues)?, energy, eps))
}

#[pyfunction]
fn variable_energy_event(eigenvalues: Vec<f64>, lo: f64, hi: f64, eps: f64) -> PyResult<bool> {
    Ok(wegner::variable_energy_event(&spectrum(eigenvalues)?, &interval(lo, hi)?, eps))
}

#[pyfunction]
fn two_volume_event(x: Vec<f64>, y: Vec<f64>, lo: f64, hi: f64, eps: f64) -> PyResult<bool> {
    Ok(wegner::two_volume_event(&spectrum(x)?, &spectrum(y)?, &interval(lo, hi)?, eps))
}

#[pyfunction]
fn h_star(u_norm: f64, sigma: f64, l0: u32, beta: f64) -> f64 {
    wegner::h_star(u_norm, sigma, l0, beta)
}

#[pyfunction]
fn delta0(sigma: f64, l0: u32, beta: f64) -> f64 {
    wegner::delta0(sigma, l0, beta)
}

/// 95% Wilson interval `(lo, hi)`.
#[pyfunction]
fn wilson_interval(successes: u64, trials: u64) -> PyResult<(f64, f64)> {
    let r = MCResult::new(successes, trials).py()?;
    Ok((r.ci95.lo, r.ci95.hi))
}

/// Monte Carlo estimate for the config's event at cube radius `radius`.
#[pyfunction]
#[pyo3(signature = (config_json, radius, trials=None, seed=None, workers=None))]
fn mc_estimate<'py>(
    py: Python<'py>,
    config_json: &str,
    radius: u32,
    trials: Option<u64>,
    seed: Option<u64>,
    workers: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let config = ExperimentConfig::from_json(config_json).py()?;
    config.validate().py()?;
    let event = config.event_spec(radius).py()?;
    let trials = trials.unwrap_or(config.run.trials);
    let seed = seed.unwrap_or(config.run.seed);
    let workers = workers.unwrap_or(config.run.workers);
    let r = py.detach(|| wegner::mc_estimate(&event, trials, seed, workers)).py()?;
    to_python(py, &r)
}

/// Fit `-ln p_hat` against `L^β` and check `upper <= L^{-q}`. `points` are
/// `(L, successes, trials)` triples.
#[pyfunction]
fn decay_fit<'py>(py: Python<'py>, points: Vec<(u32, u64, u64)>, beta: f64, q: f64) -> PyResult<Bound<'py, PyAny>> {
    let pts =
        points.into_iter().map(|(l, s, t)| MCResult::new(s, t).map(|r| (l, r))).collect::<Result<Vec<_>, _>>().py()?;
    to_python(py, &wegner::decay_fit(&pts, beta, q).py()?)
}

/// `(gamma_hat, stderr)` for the one-dimensional transfer-matrix product.
#[pyfunction]
#[pyo3(signature = (energy, distribution, steps, seed, trial=0))]
fn lyapunov(
    py: Python<'_>,
    energy: f64,
    distribution: &PyDistribution,
    steps: u64,
    seed: u64,
    trial: u64,
) -> PyResult<(f64, f64)> {
    let spec = &distribution.inner;
    let r = py.detach(|| transfer::lyapunov(energy, spec, steps, seed, trial)).py()?;
    Ok((r.gamma_hat, r.stderr))
}

/// Lyapunov exponent of a constant potential `v`, which no validated
/// distribution can express.
#[pyfunction]
#[pyo3(signature = (energy, v, steps))]
fn lyapunov_constant(energy: f64, v: f64, steps: u64) -> PyResult<(f64, f64)> {
    let r = transfer::lyapunov(energy, &DistributionSpec::point_mass(v), steps, 0, 0).py()?;
    Ok((r.gamma_hat, r.stderr))
}

/// Run a campaign; returns `{"rows": [...], "csv": str, "fit": ...,
/// "warnings": [...], "all_pass": bool}`.
#[pyfunction]
#[pyo3(signature = (config_json, seed=None, workers=None))]
fn run_experiment<'py>(
    py: Python<'py>,
    config_json: &str,
    seed: Option<u64>,
    workers: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let config = ExperimentConfig::from_json(config_json).py()?;
    let report = py.detach(|| run(&config, seed, workers)).py()?;
    let mut csv = Vec::new();
    write_results_csv(&report.rows, &mut csv).py()?;

    #[derive(Serialize)]
    struct Out<'a> {
        rows: &'a [wegner_core::experiment::ResultRow],
        csv: String,
        fit: &'a Option<wegner::DecayFit>,
        warnings: &'a [String],
        all_pass: bool,
    }
    let out = Out {
        rows: &report.rows,
        csv: String::from_utf8(csv).map_err(|e| PyRuntimeError::new_err(e.to_string()))?,
        fit: &report.fit,
        warnings: &report.warnings,
        all_pass: report.all_pass(),
    };
    to_python(py, &out)
}

/// Run self-check suites by name (all when omitted); one dict per suite.
#[pyfunction]
#[pyo3(signature = (suites=None, seed=0))]
fn verify<'py>(py: Python<'py>, suites: Option<Vec<String>>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let suites: Vec<Suite> = match suites {
        Some(names) => names.iter().map(|s| s.parse()).collect::<Result<_, _>>().py()?,
        None => Suite::ALL.to_vec(),
    };
    let reports = py.detach(|| run_suites(&suites, VerifyOptions { seed, inject_fault: false })).py()?;
    to_python(py, &reports)
}

#[pymodule]
fn wegner_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCube>()?;
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_function(wrap_pyfunction!(sumset, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_energy_event, m)?)?;
    m.add_function(wrap_pyfunction!(variable_energy_event, m)?)?;
    m.add_function(wrap_pyfunction!(two_volume_event, m)?)?;
    m.add_function(wrap_pyfunction!(h_star, m)?)?;
    m.add_function(wrap_pyfunction!(delta0, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_interval, m)?)?;
    m.add_function(wrap_pyfunction!(mc_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(decay_fit, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov_constant, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pyo3::types::PyDict;

    fn with_module<F: FnOnce(&Bound<'_, PyModule>)>(f: F) {
        Python::initialize();
        Python::attach(|py| {
            let m = PyModule::new(py, "wegner_py").unwrap();
            wegner_py(&m).unwrap();
            f(&m);
        });
    }

    #[test]
    fn hamiltonian_spectrum_from_python() {
        with_module(|m| {
            let py = m.py();
            let cube = m.getattr("Cube").unwrap().call1((1, 1, 1)).unwrap();
            let zero = m.getattr("Distribution").unwrap().call_method1("finite", (vec![0.0, 1.0], vec![1.0, 0.0]));
            // a point mass is not a valid disorder law
            assert!(zero.is_err());
            let dist = m.getattr("Distribution").unwrap().call_method0("bernoulli").unwrap();
            let kwargs = PyDict::new(py);
            kwargs.set_item("seed", 3).unwrap();
            let h = m.getattr("Hamiltonian").unwrap().call((cube, dist), Some(&kwargs)).unwrap();
            assert_eq!(h.getattr("dim").unwrap().extract::<usize>().unwrap(), 3);
            let ev: Vec<f64> = h.call_method0("spectrum").unwrap().extract().unwrap();
            assert_eq!(ev.len(), 3);
            assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        });
    }

    #[test]
    fn errors_become_value_errors() {
        with_module(|m| {
            let py = m.py();
            let err = m.getattr("Distribution").unwrap().call_method1("bernoulli", (1.0,)).unwrap_err();
            assert!(err.is_instance_of::<PyValueError>(py));
            assert!(err.to_string().contains("single-point support"));
        });
    }

    #[test]
    fn structured_results_are_dicts() {
        with_module(|m| {
            let fit =
                m.getattr("decay_fit").unwrap().call1((vec![(2u32, 50u64, 100u64), (4, 10, 100)], 0.5, 1.0)).unwrap();
            assert!(fit.cast::<PyDict>().is_ok());
            let (lo, hi): (f64, f64) = m.getattr("wilson_interval").unwrap().call1((0, 10)).unwrap().extract().unwrap();
            assert_eq!(lo, 0.0);
            assert!(hi > 0.0);
            let sums: Vec<f64> =
                m.getattr("sumset").unwrap().call1((vec![vec![0.0, 1.0], vec![0.0, 2.0]],)).unwrap().extract().unwrap();
            assert_eq!(sums, vec![0.0, 1.0, 2.0, 3.0]);
        });
    }
}
