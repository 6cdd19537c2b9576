//! Python bindings: `import lavaurs`.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use lavaurs_core::julia::{self, LavaursRenderOptions};
use lavaurs_core::schedule::{BaseOrbit, Observable};
use lavaurs_core::{implosion, precision, schedule, verify as checks};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn num_err(e: impl ToString) -> PyErr {
    PyArithmeticError::new_err(e.to_string())
}

/// Parabolic germ `w + c2 w^2 + c3 w^3 + ...`.
#[pyclass(name = "Germ", module = "lavaurs", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGerm(lavaurs_core::Germ);

#[pymethods]
impl PyGerm {
    /// Polynomial germ from `[c2, c3, ...]`.
    #[new]
    fn new(coeffs: Vec<Complex64>) -> PyResult<Self> {
        lavaurs_core::Germ::polynomial(coeffs).map(PyGerm).map_err(value_err)
    }

    #[staticmethod]
    fn quadratic() -> Self {
        PyGerm(lavaurs_core::Germ::quadratic())
    }

    /// `w / (1 - w)`.
    #[staticmethod]
    fn geometric() -> Self {
        PyGerm(lavaurs_core::Germ::geometric())
    }

    #[staticmethod]
    #[pyo3(signature = (degree = 30, eval_radius = 0.5))]
    fn geometric_truncated(degree: usize, eval_radius: f64) -> PyResult<Self> {
        lavaurs_core::Germ::geometric_truncated(degree, eval_radius)
            .map(PyGerm)
            .map_err(value_err)
    }

    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        self.0.coeffs().to_vec()
    }

    /// Iterative residue coefficient `c3 / c2^2`.
    #[getter]
    fn a(&self) -> Complex64 {
        self.0.a()
    }

    #[getter]
    fn escape_radius(&self) -> f64 {
        self.0.escape_radius()
    }

    fn __call__(&self, w: Complex64) -> PyResult<Complex64> {
        self.0.evaluate(w).map_err(num_err)
    }

    fn __repr__(&self) -> String {
        format!("Germ({:?})", self.0.coeffs())
    }
}

/// Attracting and repelling Fatou coordinates of a germ.
#[pyclass(name = "FatouSolver", module = "lavaurs", frozen)]
struct PyFatouSolver(lavaurs_core::FatouSolver);

#[pymethods]
impl PyFatouSolver {
    #[new]
    #[pyo3(signature = (germ, tol = lavaurs_core::fatou::DEFAULT_TOL))]
    fn new(germ: &PyGerm, tol: f64) -> Self {
        PyFatouSolver(lavaurs_core::FatouSolver::new(germ.0.clone()).with_tol(tol))
    }

    /// `phi^i(w)` for `w` in the parabolic basin.
    fn attracting(&self, w: Complex64) -> PyResult<Complex64> {
        self.0.attracting_coord(w).map_err(num_err)
    }

    /// `(phi^o)^{-1}(z)`.
    fn repelling_inverse(&self, z: Complex64) -> PyResult<Complex64> {
        self.0.repelling_inverse(z).map_err(num_err)
    }

    /// `L_u(w)`.
    fn lavaurs(&self, u: Complex64, w: Complex64) -> PyResult<Complex64> {
        self.0.lavaurs(u, w).map_err(num_err)
    }

    fn abel_residual(&self, w: Complex64) -> PyResult<f64> {
        self.0.abel_residual(w).map_err(num_err)
    }
}

/// Perturbation schedule `sigma_{k,n}`.
#[pyclass(name = "Schedule", module = "lavaurs", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySchedule(schedule::SigmaSchedule);

#[pymethods]
impl PySchedule {
    #[staticmethod]
    fn constant(value: Complex64) -> Self {
        PySchedule(schedule::SigmaSchedule::constant(value))
    }

    /// `sigma_{k,n} = k / n`.
    #[staticmethod]
    fn linear() -> Self {
        PySchedule(schedule::SigmaSchedule::linear())
    }

    #[staticmethod]
    fn table(values: Vec<Complex64>) -> Self {
        PySchedule(schedule::SigmaSchedule::tabulated(values))
    }

    /// Iid uniform draws in a disk.
    #[staticmethod]
    fn random_disk(seed: u64, center: Complex64, radius: f64) -> PyResult<Self> {
        schedule::SigmaSchedule::random_disk(seed, center, radius)
            .map(PySchedule)
            .map_err(value_err)
    }

    /// `sigma_k = mean + sin_amp sin(2 pi x_k) + cos_amp cos(2 pi x_k)` along
    /// the doubling map `x -> 2x mod 1`.
    #[staticmethod]
    #[pyo3(signature = (seed, mean, sin_amp = Complex64::new(0.0, 0.0), cos_amp = Complex64::new(0.0, 0.0)))]
    fn doubling(seed: u64, mean: Complex64, sin_amp: Complex64, cos_amp: Complex64) -> Self {
        let obs = Observable::Trig {
            mean,
            sin_amp,
            cos_amp,
        };
        PySchedule(schedule::SigmaSchedule::orbit_driven(BaseOrbit::doubling(seed), obs))
    }

    fn sigma(&self, k: usize, n: usize) -> PyResult<Complex64> {
        self.0.sigma(k, n).map_err(value_err)
    }

    fn epsilon(&self, k: usize, n: usize) -> PyResult<Complex64> {
        self.0.epsilon(k, n).map_err(value_err)
    }
}

/// The phase `u_n` of a schedule.
#[pyfunction]
fn phase(schedule: &PySchedule, n: usize) -> PyResult<Complex64> {
    schedule::phase(&schedule.0, n).map(|p| p.u_n).map_err(value_err)
}

/// Run one perturbed orbit and compare it with `L_{u_n}(w0)`.
#[pyfunction]
#[pyo3(signature = (germ, schedule, w0, n, beta = implosion::DEFAULT_BETA, precision = None))]
fn run_implosion<'py>(
    py: Python<'py>,
    germ: &PyGerm,
    schedule: &PySchedule,
    w0: Complex64,
    n: usize,
    beta: f64,
    precision: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let precision = precision
        .map(str::parse::<precision::Precision>)
        .transpose()
        .map_err(value_err)?;
    let opts = implosion::ImplosionOptions {
        beta,
        precision,
        ..Default::default()
    };
    let r = py
        .detach(|| implosion::run_implosion(&germ.0, &schedule.0, w0, n, &opts))
        .map_err(num_err)?;
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("k_n", r.k_n)?;
    d.set_item("precision", r.precision.name())?;
    d.set_item("u_n", r.u_n)?;
    d.set_item("w_final", r.w_final)?;
    d.set_item("lavaurs_value", r.lavaurs_value)?;
    d.set_item("error", r.error)?;
    d.set_item("degraded", r.degraded)?;
    Ok(d)
}

/// Rendered label grid.
#[pyclass(name = "Bitmap", module = "lavaurs", frozen)]
struct PyBitmap(julia::Bitmap);

#[pymethods]
impl PyBitmap {
    #[getter]
    fn width(&self) -> usize {
        self.0.grid.px_w
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.grid.px_h
    }

    /// Label name at `(col, row)`, row 0 on top.
    fn label(&self, col: usize, row: usize) -> PyResult<&'static str> {
        if col >= self.0.grid.px_w || row >= self.0.grid.px_h {
            return Err(value_err(format!("pixel ({col}, {row}) out of range")));
        }
        Ok(self.0.label(col, row).name())
    }

    fn counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for l in [
            julia::Label::Basin,
            julia::Label::JuliaNear,
            julia::Label::LavaursHit,
            julia::Label::Escapes,
            julia::Label::Undecided,
        ] {
            d.set_item(l.name(), self.0.count(l))?;
        }
        Ok(d)
    }

    fn to_ppm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.0.to_ppm())
    }
}

/// Julia-Lavaurs picture of a polynomial germ on the default window.
#[pyfunction]
#[pyo3(signature = (germ, u, px = 128, m_max = 4, julia_iter = 500))]
fn render(
    py: Python<'_>,
    germ: &PyGerm,
    u: Complex64,
    px: usize,
    m_max: usize,
    julia_iter: usize,
) -> PyResult<PyBitmap> {
    let grid = julia::GridSpec::default_window(px);
    let opts = LavaursRenderOptions {
        u,
        m_max,
        julia_iter,
        ..Default::default()
    };
    py.detach(|| julia::render_julia_lavaurs(&germ.0, &grid, &opts))
        .map(PyBitmap)
        .map_err(value_err)
}

/// Run a self-check suite; returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (suite = "all", quick = true, tol = lavaurs_core::fatou::DEFAULT_TOL))]
fn verify(py: Python<'_>, suite: &str, quick: bool, tol: f64) -> PyResult<(bool, String)> {
    let suite: checks::Suite = suite.parse().map_err(value_err)?;
    let report = py.detach(|| checks::verify(suite, quick, tol));
    let text = serde_json::to_string(&report).map_err(value_err)?;
    Ok((report.passed, text))
}

#[pymodule]
fn lavaurs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGerm>()?;
    m.add_class::<PyFatouSolver>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyBitmap>()?;
    m.add_function(wrap_pyfunction!(phase, m)?)?;
    m.add_function(wrap_pyfunction!(run_implosion, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
