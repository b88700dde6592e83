//! Python module `skewbaker`.
//!
//! Points are passed as pairs of Python `complex` values. Structured
//! results come back as dicts; orbits and rasters are classes.

use pyo3::exceptions::{PyArithmeticError, PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use skewbaker_core::basin::{
    classify_point_with, render_slice_with, write_grid_csv, write_ppm, Membership, PaletteSpec,
    PixelClass, RasterResult, RenderOptions, SliceSpec,
};
use skewbaker_core::domain::{self, AlphaParam};
use skewbaker_core::psh::{self, ProbeSpec};
use skewbaker_core::verify::{run_suite as core_run_suite, Suite, SuiteConfig};
use skewbaker_core::witness::{self, DEFAULT_FIRST_BRANCH};
use skewbaker_core::{Complex64, Error, OrbitRecord, OrbitStatus, Overflow, PlanePoint};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Overflow(_) => PyOverflowError::new_err(e.to_string()),
        Error::InvalidParameter(_) | Error::Precondition(_) | Error::NotInL => {
            PyValueError::new_err(e.to_string())
        }
        Error::Undefined | Error::InsufficientSamples { .. } | Error::Truncated { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
    }
}

fn overflow_err(_: Overflow) -> PyErr {
    PyOverflowError::new_err("exponential overflow")
}

fn point(z: Complex64, w: Complex64) -> PlanePoint {
    PlanePoint::new(z, w)
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_bound_py_any(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn class_tuple(c: &PixelClass) -> (&'static str, Option<usize>) {
    (c.tag(), c.step())
}

/// The map F applied once.
#[pyfunction]
fn apply_f(z: Complex64, w: Complex64) -> PyResult<(Complex64, Complex64)> {
    let p = skewbaker_core::apply_f(point(z, w)).map_err(overflow_err)?;
    Ok((p.z, p.w))
}

/// Finite prefix of an orbit of F.
#[pyclass(frozen, name = "Orbit")]
struct PyOrbit {
    inner: OrbitRecord,
}

#[pymethods]
impl PyOrbit {
    #[getter]
    fn points(&self) -> Vec<(Complex64, Complex64)> {
        self.inner.points.iter().map(|p| (p.z, p.w)).collect()
    }

    #[getter]
    fn requested_steps(&self) -> usize {
        self.inner.requested_steps
    }

    #[getter]
    fn completed_steps(&self) -> usize {
        self.inner.completed_steps()
    }

    /// Index of the last finite state if the next step overflowed.
    #[getter]
    fn overflow_step(&self) -> Option<usize> {
        match self.inner.status {
            OrbitStatus::Completed => None,
            OrbitStatus::Overflowed { step } => Some(step),
        }
    }

    fn is_complete(&self) -> bool {
        self.inner.is_complete()
    }

    fn __len__(&self) -> usize {
        self.inner.points.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Orbit(seed={}, completed_steps={}, requested_steps={})",
            self.inner.seed(),
            self.inner.completed_steps(),
            self.inner.requested_steps
        )
    }
}

#[pyfunction]
fn orbit(z: Complex64, w: Complex64, n: usize) -> PyOrbit {
    PyOrbit { inner: skewbaker_core::orbit(point(z, w), n) }
}

#[pyfunction]
fn in_l_alpha(z: Complex64, w: Complex64, alpha: f64) -> PyResult<bool> {
    let a = AlphaParam::new(alpha).map_err(to_py_err)?;
    Ok(domain::in_l_alpha(&point(z, w), a))
}

#[pyfunction]
fn in_l(z: Complex64, w: Complex64) -> bool {
    domain::in_l(&point(z, w))
}

/// `Re w - Re z`, or ValueError when `Re z <= 1` or `Re w <= 1`.
#[pyfunction]
fn sup_alpha(z: Complex64, w: Complex64) -> PyResult<f64> {
    domain::sup_alpha(&point(z, w)).map_err(to_py_err)
}

#[pyfunction]
fn check_invariance<'py>(
    py: Python<'py>,
    z: Complex64,
    w: Complex64,
    alpha: f64,
    n: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let a = AlphaParam::new(alpha).map_err(to_py_err)?;
    let r = domain::check_invariance(point(z, w), a, n).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("steps_checked", r.steps_checked)?;
    d.set_item("all_inside", r.all_inside)?;
    d.set_item("first_violation", r.first_violation)?;
    d.set_item("min_margin", r.min_margin)?;
    d.set_item("truncated", r.truncated)?;
    Ok(d)
}

#[pyfunction]
fn check_growth<'py>(py: Python<'py>, z: Complex64, w: Complex64, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = domain::check_growth(point(z, w), n).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("steps_checked", r.steps_checked)?;
    d.set_item("w_bound_ok", r.w_bound_ok)?;
    d.set_item("z_bound_ok", r.z_bound_ok)?;
    d.set_item("min_w_slack", r.min_w_slack)?;
    d.set_item("min_z_slack", r.min_z_slack)?;
    d.set_item("truncated", r.truncated)?;
    Ok(d)
}

#[pyfunction]
fn telescoping_residual(z: Complex64, w: Complex64, n: usize) -> PyResult<f64> {
    domain::telescoping_residual(point(z, w), n).map_err(to_py_err)
}

#[pyfunction]
fn ratio_profile<'py>(py: Python<'py>, z: Complex64, w: Complex64, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = domain::ratio_profile(point(z, w), n).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("z_over_w", r.samples.iter().map(|s| s.z_over_w).collect::<Vec<_>>())?;
    d.set_item("w_over_z", r.samples.iter().map(|s| s.w_over_z).collect::<Vec<_>>())?;
    d.set_item("stabilization_index", r.stabilization_index)?;
    d.set_item("truncated", r.truncated)?;
    Ok(d)
}

/// `h(ζ) = (e^{-3ζ} + 3ζ - 1) / (4ζ)`.
#[pyfunction]
fn h(zeta: Complex64) -> PyResult<Complex64> {
    witness::h_eval(zeta).map_err(overflow_err)
}

#[pyfunction]
#[pyo3(signature = (c, m, first_branch = DEFAULT_FIRST_BRANCH))]
fn find_witnesses<'py>(py: Python<'py>, c: Complex64, m: usize, first_branch: i64) -> PyResult<Bound<'py, PyDict>> {
    let seq = witness::find_witnesses_from(c, m, first_branch).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("branches", &seq.branches)?;
    d.set_item("zetas", &seq.zetas)?;
    d.set_item("residuals", &seq.residuals)?;
    d.set_item("moduli", &seq.moduli)?;
    d.set_item("exact_family", seq.exact_family)?;
    d.set_item("moduli_increasing", seq.moduli_increasing())?;
    let failures: Vec<(i64, String)> = seq.failures.iter().map(|f| (f.branch, f.reason.clone())).collect();
    d.set_item("failures", failures)?;
    Ok(d)
}

/// Normalized `(p, q)` of `F(ζ, 2ζ)`, or None when it overflows.
#[pyfunction]
fn image_direction(zeta: Complex64) -> Option<(Complex64, Complex64)> {
    let d = witness::image_direction(zeta);
    (!d.degenerate).then_some((d.p, d.q))
}

#[pyfunction]
fn identity_residual(zeta: Complex64) -> PyResult<f64> {
    witness::first_coord_identity_residual(zeta).map_err(to_py_err)
}

#[pyfunction]
fn u_n(z: Complex64, w: Complex64, n: usize) -> PyResult<f64> {
    psh::u_n(point(z, w), n).map_err(to_py_err)
}

/// `[(n, u_n)]` for `n = 0..=big_n` plus the maximum over the last quarter.
#[pyfunction]
fn u_profile<'py>(py: Python<'py>, z: Complex64, w: Complex64, big_n: usize) -> PyResult<Bound<'py, PyDict>> {
    let p = psh::u_profile(point(z, w), big_n).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("values", &p.values)?;
    d.set_item("tail_max", p.tail_max)?;
    d.set_item("truncated", p.truncated)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (z, w, n, direction = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), radius = 0.01, samples = 64))]
fn submean_check<'py>(
    py: Python<'py>,
    z: Complex64,
    w: Complex64,
    n: usize,
    direction: (Complex64, Complex64),
    radius: f64,
    samples: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let probe = ProbeSpec::new(point(z, w), point(direction.0, direction.1), radius, samples)
        .map_err(to_py_err)?;
    let r = psh::submean_check(&probe, n).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("center_value", r.center_value)?;
    d.set_item("circle_mean", r.circle_mean)?;
    d.set_item("deficit", r.deficit)?;
    d.set_item("valid_samples", r.valid_samples)?;
    Ok(d)
}

/// `("entered" | "overflowed" | "not_entered", step)`.
#[pyfunction]
#[pyo3(signature = (z, w, budget, threshold = 1.0))]
fn classify_point(z: Complex64, w: Complex64, budget: usize, threshold: f64) -> PyResult<(&'static str, Option<usize>)> {
    let m = Membership::new(threshold).map_err(to_py_err)?;
    Ok(class_tuple(&classify_point_with(point(z, w), budget, m)))
}

/// Classified pixel grid of a rendered slice.
#[pyclass(frozen, name = "Raster")]
struct PyRaster {
    inner: RasterResult,
}

#[pymethods]
impl PyRaster {
    #[getter]
    fn width(&self) -> usize {
        self.inner.spec.width
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.spec.height
    }

    #[getter]
    fn stats(&self) -> (usize, usize, usize) {
        let s = self.inner.stats;
        (s.entered, s.overflowed, s.not_entered)
    }

    fn class_at(&self, i: usize, j: usize) -> PyResult<(&'static str, Option<usize>)> {
        if i >= self.width() || j >= self.height() {
            return Err(PyValueError::new_err("pixel index out of range"));
        }
        Ok(class_tuple(&self.inner.class_at(i, j)))
    }

    /// Binary P6 image in the default palette.
    fn ppm<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let bytes = write_ppm(&self.inner, &PaletteSpec::default()).map_err(to_py_err)?;
        Ok(PyBytes::new(py, &bytes))
    }

    fn csv(&self) -> String {
        String::from_utf8(write_grid_csv(&self.inner)).expect("csv is ascii")
    }

    fn __repr__(&self) -> String {
        let (e, o, n) = self.stats();
        format!(
            "Raster({}x{}, entered={e}, overflowed={o}, not_entered={n})",
            self.width(),
            self.height()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (
    base,
    dir_u = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
    dir_v = (Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)),
    u_range = (-5.0, 5.0),
    v_range = (-5.0, 5.0),
    width = 512,
    height = 512,
    budget = 200,
    threshold = 1.0,
    workers = None,
))]
#[allow(clippy::too_many_arguments)]
fn render_slice(
    py: Python<'_>,
    base: (Complex64, Complex64),
    dir_u: (Complex64, Complex64),
    dir_v: (Complex64, Complex64),
    u_range: (f64, f64),
    v_range: (f64, f64),
    width: usize,
    height: usize,
    budget: usize,
    threshold: f64,
    workers: Option<usize>,
) -> PyResult<PyRaster> {
    let spec = SliceSpec {
        base: point(base.0, base.1),
        dir_u: point(dir_u.0, dir_u.1),
        dir_v: point(dir_v.0, dir_v.1),
        u_range,
        v_range,
        width,
        height,
    };
    let opts = RenderOptions {
        budget,
        membership: Membership::new(threshold).map_err(to_py_err)?,
        workers,
    };
    let inner = py
        .detach(|| render_slice_with(&spec, &opts))
        .map_err(to_py_err)?;
    Ok(PyRaster { inner })
}

/// Run a verification suite and return its summary record.
#[pyfunction]
#[pyo3(signature = (suite, samples = 1000, seed = 0, steps = 30))]
fn run_suite<'py>(py: Python<'py>, suite: &str, samples: usize, seed: u64, steps: usize) -> PyResult<Bound<'py, PyDict>> {
    let suite: Suite = suite.parse().map_err(to_py_err)?;
    let cfg = SuiteConfig { samples, seed, steps };
    let outcome = py.detach(|| core_run_suite(suite, cfg)).map_err(to_py_err)?;
    let d = PyDict::new(py);
    for (k, v) in outcome.summary_record().entries() {
        d.set_item(k, json_to_py(py, v)?)?;
    }
    Ok(d)
}

#[pymodule]
fn skewbaker(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOrbit>()?;
    m.add_class::<PyRaster>()?;
    m.add_function(wrap_pyfunction!(apply_f, m)?)?;
    m.add_function(wrap_pyfunction!(orbit, m)?)?;
    m.add_function(wrap_pyfunction!(in_l_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(in_l, m)?)?;
    m.add_function(wrap_pyfunction!(sup_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(check_invariance, m)?)?;
    m.add_function(wrap_pyfunction!(check_growth, m)?)?;
    m.add_function(wrap_pyfunction!(telescoping_residual, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_profile, m)?)?;
    m.add_function(wrap_pyfunction!(h, m)?)?;
    m.add_function(wrap_pyfunction!(find_witnesses, m)?)?;
    m.add_function(wrap_pyfunction!(image_direction, m)?)?;
    m.add_function(wrap_pyfunction!(identity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(u_n, m)?)?;
    m.add_function(wrap_pyfunction!(u_profile, m)?)?;
    m.add_function(wrap_pyfunction!(submean_check, m)?)?;
    m.add_function(wrap_pyfunction!(classify_point, m)?)?;
    m.add_function(wrap_pyfunction!(render_slice, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
