//! Python module `lapgrowth`: the zero lattice, the canonical product, the
//! Borel transform, the contour integrals and the growth verdict.

use laplace_growth::borel::{BorelEvaluator, CoefficientStream};
use laplace_growth::contour::{GammaShape, LaplaceConfig, LaplaceSplit};
use laplace_growth::diagnostics::{self, ClassifyParams, RegularityVerdict};
use laplace_growth::lattice::ZeroLattice;
use laplace_growth::product::{GrowthProfile, ProductEvaluator};
use laplace_growth::{Complex64, Error};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::InsufficientSamples(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

/// The dyadic zero set: `2^k` equally spaced zeros on each circle `|z| = 2^k`.
#[pyclass(name = "Lattice", frozen)]
struct PyLattice {
    inner: ZeroLattice,
}

#[pymethods]
impl PyLattice {
    #[new]
    #[pyo3(signature = (k_max = 20))]
    fn new(k_max: u32) -> PyResult<Self> {
        Ok(Self {
            inner: ZeroLattice::new(k_max).map_err(to_py)?,
        })
    }

    #[getter]
    fn k_max(&self) -> u32 {
        self.inner.k_max()
    }

    /// Zeros on circle `k`, in order of increasing argument.
    fn circle(&self, k: u32) -> PyResult<Vec<Complex64>> {
        if !(1..=self.inner.k_max()).contains(&k) {
            return Err(PyValueError::new_err(format!(
                "circle index must lie in 1..={}, got {k}",
                self.inner.k_max()
            )));
        }
        Ok(self.inner.circle(k).map(|p| p.value).collect())
    }

    /// `n(r)`, the number of zeros with `|a| <= r`.
    fn counting(&self, r: f64) -> PyResult<u64> {
        self.inner.counting(r).map_err(to_py)
    }

    /// `Σ_{|a| <= r} 1/a`, compensated.
    fn reciprocal_sum(&self, r: f64) -> PyResult<Complex64> {
        self.inner.reciprocal_sum(r).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Lattice(k_max={})", self.inner.k_max())
    }
}

/// The canonical product `f(z) = ∏ (1 - (z/2^k)^{2^k})`.
#[pyclass(name = "Product", frozen)]
struct PyProduct {
    inner: ProductEvaluator,
}

#[pymethods]
impl PyProduct {
    #[new]
    #[pyo3(signature = (k_max = 20))]
    fn new(k_max: u32) -> PyResult<Self> {
        Ok(Self {
            inner: ProductEvaluator::new(ZeroLattice::new(k_max).map_err(to_py)?),
        })
    }

    /// `f(z)`; overflows to inf for very large `|z|`, see `log_f`.
    fn f(&self, z: Complex64) -> Complex64 {
        self.inner.eval_log_f(z).to_complex()
    }

    /// `(log|f(z)|, arg f(z))`; `log|f|` is `-inf` at a zero.
    fn log_f(&self, z: Complex64) -> (f64, f64) {
        let v = self.inner.eval_log_f(z);
        (v.log_mag, v.arg)
    }

    /// `log|f(re^{iθ})|/r` at each radius.
    fn profile(&self, py: Python<'_>, theta: f64, radii: Vec<f64>) -> PyResult<Vec<f64>> {
        let inner = self.inner;
        py.detach(|| GrowthProfile::sample("f", theta, radii, |z| inner.eval_log_f(z)))
            .map(|p| p.values)
            .map_err(to_py)
    }

    /// `log M(r)/r` estimated over `n_theta` directions (a lower bound).
    #[pyo3(signature = (r, n_theta = 64))]
    fn max_modulus(&self, r: f64, n_theta: usize) -> PyResult<f64> {
        self.inner.max_modulus(r, n_theta).map_err(to_py)
    }
}

/// `a_m`, the Taylor coefficient of `z^m` in `f`.
#[pyfunction]
fn taylor_coefficient(m: u64) -> f64 {
    CoefficientStream.taylor_coefficient(m).value()
}

/// `g(s) = Σ m!·a_m / s^{m+1}` for `|s| >= 2.5`.
#[pyfunction]
fn borel(s: Complex64) -> PyResult<Complex64> {
    BorelEvaluator::default().borel_eval(s).map_err(to_py)
}

/// Contour integrals `(1/2πi)∫ g(s) e^{zs} ds` on a circle, on `γ` and on `I`.
#[pyclass(name = "Laplace", frozen)]
struct PyLaplace {
    inner: LaplaceSplit,
}

#[pymethods]
impl PyLaplace {
    #[new]
    #[pyo3(signature = (radius = 3.0, spiral = false))]
    fn new(radius: f64, spiral: bool) -> PyResult<Self> {
        let gamma = if spiral {
            GammaShape::Spiral
        } else {
            GammaShape::Tight
        };
        let inner = LaplaceSplit::new(LaplaceConfig {
            circle_radius: radius,
            gamma,
            ..LaplaceConfig::default()
        })
        .map_err(to_py)?;
        Ok(Self { inner })
    }

    /// `f(z)` recovered from `g` on the circle.
    fn inversion(&self, py: Python<'_>, z: Complex64) -> PyResult<Complex64> {
        py.detach(|| self.inner.inversion(z))
            .map(|q| q.value)
            .map_err(to_py)
    }

    /// `u(z)`, the integral over the segment from -3 to -4.
    fn u(&self, py: Python<'_>, z: Complex64) -> PyResult<Complex64> {
        py.detach(|| self.inner.u(z))
            .map(|q| q.value)
            .map_err(to_py)
    }

    /// `F(z)`, the integral over `γ`.
    fn big_f(&self, py: Python<'_>, z: Complex64) -> PyResult<Complex64> {
        py.detach(|| self.inner.big_f(z))
            .map(|q| q.value)
            .map_err(to_py)
    }
}

fn verdict_dict<'py>(py: Python<'py>, v: &RegularityVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("function_id", &v.function_id)?;
    d.set_item("theta", v.theta)?;
    d.set_item("verdict", v.verdict.as_str())?;
    d.set_item("limit_or_gap", v.limit_or_gap)?;
    d.set_item("windows", &v.windows)?;
    d.set_item("q", v.q)?;
    d.set_item("gap_tol", v.gap_tol)?;
    d.set_item("drift_tol", v.drift_tol)?;
    Ok(d)
}

/// Regular, irregular or inconclusive growth of sampled `log|φ(re^{iθ})|/r`.
#[pyfunction]
#[pyo3(signature = (radii, values, theta = 0.0, q = 0.1, gap_tol = 0.02, drift_tol = 0.02, function_id = "phi"))]
#[allow(clippy::too_many_arguments)]
fn classify<'py>(
    py: Python<'py>,
    radii: Vec<f64>,
    values: Vec<f64>,
    theta: f64,
    q: f64,
    gap_tol: f64,
    drift_tol: f64,
    function_id: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let profile = GrowthProfile::new(function_id, theta, radii, values).map_err(to_py)?;
    let params = ClassifyParams {
        q,
        gap_tol,
        drift_tol,
        ..ClassifyParams::default()
    };
    let v = diagnostics::classify_with(&profile, &params).map_err(to_py)?;
    verdict_dict(py, &v)
}

#[pymodule]
fn lapgrowth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyProduct>()?;
    m.add_class::<PyLaplace>()?;
    m.add_function(wrap_pyfunction!(taylor_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(borel, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    Ok(())
}
