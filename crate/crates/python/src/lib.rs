//! Python bindings: the set model as `RealCompactSet` and the solved
//! pipeline (equilibrium measure + Green's function) as `Evaluator`.
//!
//! Usage from Python:
//!
//!     import bernstein_lab as bl
//!     e = bl.RealCompactSet.parse('{"intervals": [[-1, 1]]}')
//!     ev = bl.Evaluator(e)
//!     ev.capacity()            # 0.5
//!     ev.normal_derivative(0.5)  # 1/sqrt(1 - 0.25)

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bernstein_lab_core as core;
use bernstein_lab_core::ErrorKind;

fn to_py_err(err: core::Error) -> PyErr {
    match err.kind() {
        ErrorKind::Input => PyValueError::new_err(err.to_string()),
        ErrorKind::Numerical => PyRuntimeError::new_err(err.to_string()),
    }
}

/// A compact union of closed real intervals in canonical form.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct RealCompactSet {
    inner: core::RealCompactSet,
}

#[pymethods]
impl RealCompactSet {
    /// Build from a list of (left, right) pairs; merges and sorts.
    #[new]
    fn new(intervals: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(Self { inner: core::RealCompactSet::new(intervals).map_err(to_py_err)? })
    }

    /// Parse the JSON descriptor {"intervals": [[a,b], ...]}.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: core::RealCompactSet::parse(text).map_err(to_py_err)? })
    }

    /// Generation-k prefix of the Cantor construction on (a, b).
    #[staticmethod]
    fn cantor(ratio: f64, k: u32, a: f64, b: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::RealCompactSet::cantor_generation(ratio, k, (a, b))
                .map_err(to_py_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn intervals(&self) -> Vec<(f64, f64)> {
        self.inner.intervals().iter().map(|iv| (iv.left, iv.right)).collect()
    }

    /// Union with [x0-delta, x0+delta].
    fn dilate(&self, x0: f64, delta: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.dilate(x0, delta).map_err(to_py_err)? })
    }

    /// "interior" | "endpoint" | "gap" | "outside-hull".
    fn classify(&self, x: f64) -> String {
        self.inner.classify_point(x).location.as_str().to_string()
    }

    fn contains(&self, x: f64) -> bool {
        self.inner.contains(x)
    }

    fn __repr__(&self) -> String {
        format!("RealCompactSet({})", self.inner.to_json())
    }
}

/// Solved pipeline for one set: equilibrium density, capacity, Green's
/// function, comb map and Bernstein factors.
#[pyclass]
struct Evaluator {
    eq: core::EquilibriumDensity,
    green: core::GreenEvaluator,
}

#[pymethods]
impl Evaluator {
    #[new]
    fn new(set: &RealCompactSet) -> PyResult<Self> {
        let eq = core::solve_gap_polynomial(&set.inner).map_err(to_py_err)?;
        let green = core::build_green(&eq).map_err(to_py_err)?;
        Ok(Self { eq, green })
    }

    fn capacity(&self) -> f64 {
        self.green.capacity()
    }

    fn robin(&self) -> f64 {
        self.green.robin()
    }

    /// Equilibrium density at a strictly interior point.
    fn density(&self, x: f64) -> PyResult<f64> {
        self.eq.density(x).map_err(to_py_err)
    }

    /// Equilibrium mass of E ∩ (-inf, x0].
    fn cdf(&self, x0: f64) -> f64 {
        self.eq.cdf(x0)
    }

    /// Green's function g(z) at z = re + i*im (clamped nonnegative).
    fn green(&self, re: f64, im: f64) -> f64 {
        self.green.green_value(Complex64::new(re, im))
    }

    /// Comb map f(z) for Im z > 0, returned as (re, im).
    fn comb(&self, re: f64, im: f64) -> PyResult<(f64, f64)> {
        let w = core::comb_value(&self.green, Complex64::new(re, im))
            .map_err(to_py_err)?
            .w;
        Ok((w.re, w.im))
    }

    /// Boundary base point of the comb map at x0.
    fn base_point(&self, x0: f64) -> PyResult<f64> {
        core::base_point(&self.eq, x0).map_err(to_py_err)
    }

    /// ∫ g(x)/(x-x0)^2 dx over the whole line.
    fn lemma3(&self, x0: f64) -> PyResult<f64> {
        Ok(self.green.lemma3_integral(x0).map_err(to_py_err)?.value)
    }

    /// Bernstein factor by the finite-difference ladder.
    fn normal_derivative(&self, x0: f64) -> PyResult<f64> {
        core::normal_derivative(&self.green, x0).map_err(to_py_err)
    }

    /// Bernstein factor by the interior density formula pi*omega(x0).
    fn density_factor(&self, x0: f64) -> PyResult<f64> {
        core::interior_density_factor(&self.eq, x0).map_err(to_py_err)
    }

    /// Bernstein factor by the comb-map angular derivative.
    fn angular_derivative(&self, x0: f64) -> PyResult<f64> {
        Ok(core::angular_derivative_probe(&self.green, x0, 1e-6, 1e-2, 15)
            .map_err(to_py_err)?
            .extrapolated)
    }

    /// Full report: three h routes, dilation table, Lipschitz verdict.
    fn bernstein_report<'py>(
        &self,
        py: Python<'py>,
        x0: f64,
        deltas: Vec<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let report =
            core::bernstein_report(self.eq.set(), x0, &deltas).map_err(to_py_err)?;
        let dict = PyDict::new(py);
        dict.set_item("x0", report.x0)?;
        dict.set_item("h_normal", report.h_normal)?;
        dict.set_item("h_density", report.h_density)?;
        dict.set_item("h_comb", report.h_comb)?;
        dict.set_item("spread", report.consistency_spread)?;
        dict.set_item("delta_table", report.delta_table)?;
        let lip = PyDict::new(py);
        lip.set_item("verdict", report.lipschitz.verdict.as_str())?;
        lip.set_item("exponent_estimate", report.lipschitz.exponent_estimate)?;
        lip.set_item("ratios", report.lipschitz.ratios)?;
        dict.set_item("lipschitz", lip)?;
        Ok(dict)
    }

    /// Near-extremal polynomial for max p'(x0), |p| <= 1 on E.
    fn extremal<'py>(
        &self,
        py: Python<'py>,
        x0: f64,
        n: usize,
        grid_per_interval: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let result = core::extremal_polynomial(self.eq.set(), x0, n, grid_per_interval)
            .map_err(to_py_err)?;
        let dict = PyDict::new(py);
        dict.set_item("n", n)?;
        dict.set_item("value", result.value)?;
        dict.set_item("ratio", result.ratio)?;
        dict.set_item("iterations", result.iterations)?;
        dict.set_item("grid_size", result.grid_size)?;
        dict.set_item("coefficients", result.poly.coeffs().to_vec())?;
        Ok(dict)
    }

    fn __repr__(&self) -> String {
        format!(
            "Evaluator(set={}, capacity={:.12})",
            self.eq.set().to_json(),
            self.green.capacity()
        )
    }
}

/// Sup-norm of a Chebyshev-basis polynomial over a set.
#[pyfunction]
fn sup_norm(set: &RealCompactSet, coeffs: Vec<f64>) -> PyResult<f64> {
    if coeffs.is_empty() {
        return Err(PyValueError::new_err("need at least one coefficient"));
    }
    let hull = set.inner.hull();
    let p = core::Polynomial::new((hull.left, hull.right), coeffs);
    Ok(core::sup_norm(&set.inner, &p))
}

#[pymodule]
fn bernstein_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<RealCompactSet>()?;
    m.add_class::<Evaluator>()?;
    m.add_function(wrap_pyfunction!(sup_norm, m)?)?;
    Ok(())
}
