//! Python bindings for the deformed-Fourier library.
//!
//! The module mirrors the Rust API surface: density construction, the
//! forward transform (pointwise and batched), the diagonal transform and
//! its closed forms, the regularized inverse round trip, equivalence-class
//! verification, and the built-in acceptance checks.
//!
//! Configuration errors (inadmissible parameters, malformed inputs) map
//! to `ValueError`; numeric failures (non-convergence, branch cuts,
//! unachievable targets) map to `RuntimeError`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qfourier::densities::{DensitySpec, HilhorstFamily, TabulatedDensity};
use qfourier::equivalence::{self, EquivalenceClassProbe};
use qfourier::inverse::{self, InverseConfig};
use qfourier::quad::QuadratureConfig;
use qfourier::selftest;
use qfourier::transform;
use qfourier::{DeformationParameter, Error};

fn to_py_err(e: Error) -> PyErr {
    if e.is_config_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn dp(q: f64) -> PyResult<DeformationParameter> {
    DeformationParameter::new(q).map_err(to_py_err)
}

/// Builds a quadrature configuration from optional keyword overrides.
fn quad_config(
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<u32>,
    tail_cutoff: Option<f64>,
) -> QuadratureConfig {
    let mut cfg = QuadratureConfig::default();
    if let Some(v) = rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(v) = max_subdivisions {
        cfg.max_subdivisions = v;
    }
    if let Some(v) = tail_cutoff {
        cfg.tail_cutoff = v;
    }
    cfg
}

/// A probability density on the real line.
#[pyclass(name = "Density", frozen)]
pub struct PyDensity {
    inner: DensitySpec,
}

#[pymethods]
impl PyDensity {
    /// Power-law member `(lam/x)^beta` on `[a, b]` at index `q`.
    #[staticmethod]
    fn hilhorst(a: f64, b: f64, q: f64) -> PyResult<Self> {
        Ok(Self {
            inner: DensitySpec::hilhorst(a, b, dp(q)?).map_err(to_py_err)?,
        })
    }

    /// Deformed Gaussian of the given width, normalized numerically.
    #[staticmethod]
    #[pyo3(signature = (q, width, *, rel_tol=None, abs_tol=None, max_subdivisions=None, tail_cutoff=None))]
    fn q_gaussian(
        q: f64,
        width: f64,
        rel_tol: Option<f64>,
        abs_tol: Option<f64>,
        max_subdivisions: Option<u32>,
        tail_cutoff: Option<f64>,
    ) -> PyResult<Self> {
        let cfg = quad_config(rel_tol, abs_tol, max_subdivisions, tail_cutoff);
        Ok(Self {
            inner: DensitySpec::q_gaussian(dp(q)?, width, &cfg).map_err(to_py_err)?,
        })
    }

    /// Piecewise-linear density through the given `(x, f)` table.
    #[staticmethod]
    fn tabulated(xs: Vec<f64>, fs: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: DensitySpec::tabulated(TabulatedDensity::new(xs, fs).map_err(to_py_err)?),
        })
    }

    /// Loads a tabulated density from an `x,f` CSV file.
    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: DensitySpec::tabulated(TabulatedDensity::from_csv(path).map_err(to_py_err)?),
        })
    }

    /// Pointwise value `f(x)`.
    fn eval(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    /// `(lo, hi)` for compact support, `None` for the whole line.
    fn support(&self) -> Option<(f64, f64)> {
        match self.inner.support() {
            qfourier::densities::Support::Compact { lo, hi } => Some((lo, hi)),
            qfourier::densities::Support::RealLine => None,
        }
    }

    /// The density's own deformation index, when it carries one.
    fn own_q(&self) -> Option<f64> {
        self.inner.own_q().map(DeformationParameter::value)
    }

    fn describe(&self) -> String {
        self.inner.describe()
    }

    fn __repr__(&self) -> String {
        format!("Density({})", self.inner.describe())
    }
}

/// One transform evaluation: the frequency, the value, and the
/// quadrature error estimate.
#[pyclass(name = "TransformSample", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyTransformSample {
    #[pyo3(get)]
    pub k: Complex64,
    #[pyo3(get)]
    pub value: Complex64,
    #[pyo3(get)]
    pub abs_err_estimate: f64,
}

impl From<transform::TransformSample> for PyTransformSample {
    fn from(s: transform::TransformSample) -> Self {
        Self {
            k: s.k,
            value: s.value,
            abs_err_estimate: s.abs_err_estimate,
        }
    }
}

#[pymethods]
impl PyTransformSample {
    fn __repr__(&self) -> String {
        format!(
            "TransformSample(k={}, value={}, abs_err_estimate={:e})",
            self.k, self.value, self.abs_err_estimate
        )
    }
}

/// One evaluation point of an inverse round trip.
#[pyclass(name = "RecoveryPoint", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyRecoveryPoint {
    #[pyo3(get)]
    pub x: f64,
    #[pyo3(get)]
    pub f_true: f64,
    #[pyo3(get)]
    pub f_recovered: f64,
    #[pyo3(get)]
    pub abs_err: f64,
    /// Within the jump-exclusion window of a support endpoint.
    #[pyo3(get)]
    pub flagged: bool,
    #[pyo3(get)]
    pub imag_residue: f64,
}

#[pymethods]
impl PyRecoveryPoint {
    fn __repr__(&self) -> String {
        format!(
            "RecoveryPoint(x={}, f_true={}, f_recovered={}, flagged={})",
            self.x, self.f_true, self.f_recovered, self.flagged
        )
    }
}

/// Aggregate result of recovering a density from its spectrum.
#[pyclass(name = "RecoveryReport", frozen)]
pub struct PyRecoveryReport {
    #[pyo3(get)]
    pub epsilon: f64,
    #[pyo3(get)]
    pub k_max: f64,
    #[pyo3(get)]
    pub n_k: usize,
    #[pyo3(get)]
    pub points: Vec<PyRecoveryPoint>,
    /// Sum of absolute errors over unflagged points.
    #[pyo3(get)]
    pub l1_error: f64,
    #[pyo3(get)]
    pub max_imag_residue: f64,
    /// The sampled spectrum had not decayed by `k_max`.
    #[pyo3(get)]
    pub truncation_dominated: bool,
}

#[pymethods]
impl PyRecoveryReport {
    fn __repr__(&self) -> String {
        format!(
            "RecoveryReport(epsilon={:e}, k_max={}, n_k={}, points={}, l1_error={:e})",
            self.epsilon,
            self.k_max,
            self.n_k,
            self.points.len(),
            self.l1_error
        )
    }
}

/// A finite sample of one equivalence class.
#[pyclass(name = "ClassProbe", frozen)]
pub struct PyClassProbe {
    inner: EquivalenceClassProbe,
}

#[pymethods]
impl PyClassProbe {
    #[getter]
    fn q(&self) -> f64 {
        self.inner.q.value()
    }

    /// The class's shared scale invariant.
    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }

    /// `(a, b)` support endpoints of each member.
    fn members(&self) -> Vec<(f64, f64)> {
        self.inner.members.iter().map(|m| (m.a, m.b)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "ClassProbe(q={}, lam={}, members={:?})",
            self.inner.q.value(),
            self.inner.lambda,
            self.members()
        )
    }
}

/// Verdict of a within-class collapse check.
#[pyclass(name = "CollapseReport", frozen)]
pub struct PyCollapseReport {
    #[pyo3(get)]
    pub q: f64,
    #[pyo3(get)]
    pub lam: f64,
    #[pyo3(get)]
    pub members: Vec<(f64, f64)>,
    #[pyo3(get)]
    pub max_pairwise_deviation: f64,
    #[pyo3(get)]
    pub max_closed_form_deviation: f64,
    /// Members are numerically indistinguishable on the grid.
    #[pyo3(get)]
    pub collapse_ok: bool,
    /// Every member matches the closed diagonal form within budget.
    #[pyo3(get)]
    pub closed_form_ok: bool,
}

#[pymethods]
impl PyCollapseReport {
    fn __repr__(&self) -> String {
        format!(
            "CollapseReport(q={}, lam={}, max_pairwise_deviation={:e}, collapse_ok={}, closed_form_ok={})",
            self.q, self.lam, self.max_pairwise_deviation, self.collapse_ok, self.closed_form_ok
        )
    }
}

/// Verdict of a between-class separation check.
#[pyclass(name = "SeparationReport", frozen)]
pub struct PySeparationReport {
    #[pyo3(get)]
    pub q: f64,
    #[pyo3(get)]
    pub lambda1: f64,
    #[pyo3(get)]
    pub lambda2: f64,
    #[pyo3(get)]
    pub min_deviation: f64,
    #[pyo3(get)]
    pub min_witness_k: f64,
    #[pyo3(get)]
    pub max_deviation: f64,
    #[pyo3(get)]
    pub max_witness_k: f64,
    /// Lower bound the maximum deviation must clear.
    #[pyo3(get)]
    pub floor: f64,
    /// No nonzero k on the grid, so separation cannot show up.
    #[pyo3(get)]
    pub grid_insufficient: bool,
    #[pyo3(get)]
    pub separation_ok: bool,
}

#[pymethods]
impl PySeparationReport {
    fn __repr__(&self) -> String {
        format!(
            "SeparationReport(lambda1={}, lambda2={}, max_deviation={:e} at k={}, separation_ok={})",
            self.lambda1, self.lambda2, self.max_deviation, self.max_witness_k, self.separation_ok
        )
    }
}

/// Deformed exponential `[1 + (1-q) z]^(1/(1-q))`, principal branch.
#[pyfunction]
fn q_exp(z: Complex64, q: f64) -> PyResult<Complex64> {
    qfourier::qkernel::q_exp(z, dp(q)?).map_err(to_py_err)
}

/// Scale invariant of the power-law member on `[a, b]` at index `q`.
#[pyfunction]
fn hilhorst_lambda(a: f64, b: f64, q: f64) -> PyResult<f64> {
    qfourier::densities::hilhorst_lambda(a, b, dp(q)?).map_err(to_py_err)
}

/// Right support endpoint that reaches the invariant `lam` from `a`.
#[pyfunction]
fn solve_b_for_lambda(a: f64, lam: f64, q: f64) -> PyResult<f64> {
    qfourier::densities::solve_b_for_lambda(a, lam, dp(q)?).map_err(to_py_err)
}

/// Transform of `density` at complex frequency `k` and index `qp`.
#[pyfunction]
#[pyo3(signature = (density, k, qp, *, rel_tol=None, abs_tol=None, max_subdivisions=None, tail_cutoff=None))]
fn qft(
    density: &PyDensity,
    k: Complex64,
    qp: f64,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<u32>,
    tail_cutoff: Option<f64>,
) -> PyResult<PyTransformSample> {
    let cfg = quad_config(rel_tol, abs_tol, max_subdivisions, tail_cutoff);
    transform::qft_complex(&density.inner, k, qp, &cfg)
        .map(Into::into)
        .map_err(to_py_err)
}

/// Transform of `density` on a list of complex frequencies, in order.
#[pyfunction]
#[pyo3(signature = (density, ks, qp, *, rel_tol=None, abs_tol=None, max_subdivisions=None, tail_cutoff=None))]
fn transform_batch(
    density: &PyDensity,
    ks: Vec<Complex64>,
    qp: f64,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<u32>,
    tail_cutoff: Option<f64>,
) -> PyResult<Vec<PyTransformSample>> {
    let cfg = quad_config(rel_tol, abs_tol, max_subdivisions, tail_cutoff);
    transform::transform_batch(&density.inner, &ks, qp, &cfg)
        .map(|v| v.into_iter().map(Into::into).collect())
        .map_err(to_py_err)
}

/// Diagonal transform: index taken from the density itself.
#[pyfunction]
#[pyo3(signature = (density, k, *, rel_tol=None, abs_tol=None, max_subdivisions=None, tail_cutoff=None))]
fn ft_diagonal(
    density: &PyDensity,
    k: Complex64,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<u32>,
    tail_cutoff: Option<f64>,
) -> PyResult<PyTransformSample> {
    let cfg = quad_config(rel_tol, abs_tol, max_subdivisions, tail_cutoff);
    transform::ft_diagonal(&density.inner, k, &cfg)
        .map(Into::into)
        .map_err(to_py_err)
}

/// Closed diagonal transform of the `(q, lam)` class.
#[pyfunction]
fn hilhorst_uts_closed(lam: f64, q: f64, k: Complex64) -> PyResult<Complex64> {
    transform::hilhorst_uts_closed(lam, q, k).map_err(to_py_err)
}

/// Closed hypergeometric transform of the power-law member on `[a, b]`
/// at density index `q`, transform index `qp`, upper half-plane `k`.
#[pyfunction]
#[pyo3(signature = (a, b, q, k, qp, *, strict_as_printed=false))]
fn hilhorst_full_closed(
    a: f64,
    b: f64,
    q: f64,
    k: Complex64,
    qp: f64,
    strict_as_printed: bool,
) -> PyResult<Complex64> {
    let fam = HilhorstFamily::new(a, b, dp(q)?).map_err(to_py_err)?;
    transform::hilhorst_full_closed(&fam, k, qp, strict_as_printed).map_err(to_py_err)
}

/// Samples the density's spectrum at index `1 + epsilon`, inverts it at
/// `x_points`, and reports pointwise and aggregate recovery errors.
#[pyfunction]
#[pyo3(signature = (density, x_points, *, epsilon=1e-6, k_max=200.0, n_k=8192,
                    rel_tol=None, abs_tol=None, max_subdivisions=None, tail_cutoff=None))]
#[allow(clippy::too_many_arguments)]
fn roundtrip(
    density: &PyDensity,
    x_points: Vec<f64>,
    epsilon: f64,
    k_max: f64,
    n_k: usize,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<u32>,
    tail_cutoff: Option<f64>,
) -> PyResult<PyRecoveryReport> {
    let cfg = InverseConfig {
        epsilon,
        k_max,
        n_k,
        x_points,
    };
    let qcfg = quad_config(rel_tol, abs_tol, max_subdivisions, tail_cutoff);
    let report = inverse::roundtrip(&density.inner, &cfg, &qcfg).map_err(to_py_err)?;
    Ok(PyRecoveryReport {
        epsilon: report.epsilon,
        k_max: report.k_max,
        n_k: report.n_k,
        points: report
            .points
            .iter()
            .map(|p| PyRecoveryPoint {
                x: p.x,
                f_true: p.f_true,
                f_recovered: p.f_recovered,
                abs_err: p.abs_err,
                flagged: p.flagged,
                imag_residue: p.imag_residue,
            })
            .collect(),
        l1_error: report.l1_error,
        max_imag_residue: report.max_imag_residue,
        truncation_dominated: report.truncation_dominated,
    })
}

/// Builds the `(q, lam)` class with one member per lower endpoint.
#[pyfunction]
fn build_class(q: f64, lam: f64, a_values: Vec<f64>) -> PyResult<PyClassProbe> {
    Ok(PyClassProbe {
        inner: equivalence::build_class(dp(q)?, lam, &a_values).map_err(to_py_err)?,
    })
}

/// Checks that all members of the probe share one diagonal transform
/// matching the closed form on the real `k_grid`.
#[pyfunction]
#[pyo3(signature = (probe, k_grid, *, rel_tol=None, abs_tol=None, max_subdivisions=None, tail_cutoff=None))]
fn verify_collapse(
    probe: &PyClassProbe,
    k_grid: Vec<f64>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<u32>,
    tail_cutoff: Option<f64>,
) -> PyResult<PyCollapseReport> {
    let cfg = quad_config(rel_tol, abs_tol, max_subdivisions, tail_cutoff);
    let r = equivalence::verify_collapse(&probe.inner, &k_grid, &cfg).map_err(to_py_err)?;
    Ok(PyCollapseReport {
        q: r.q,
        lam: r.lambda,
        members: r.members,
        max_pairwise_deviation: r.max_pairwise_deviation,
        max_closed_form_deviation: r.max_closed_form_deviation,
        collapse_ok: r.collapse_ok,
        closed_form_ok: r.closed_form_ok,
    })
}

/// Checks that two classes at the same index but different invariants
/// have distinguishable closed diagonal transforms on the `k_grid`.
#[pyfunction]
fn verify_separation(
    probe1: &PyClassProbe,
    probe2: &PyClassProbe,
    k_grid: Vec<f64>,
) -> PyResult<PySeparationReport> {
    let r = equivalence::verify_separation(&probe1.inner, &probe2.inner, &k_grid)
        .map_err(to_py_err)?;
    Ok(PySeparationReport {
        q: r.q,
        lambda1: r.lambda1,
        lambda2: r.lambda2,
        min_deviation: r.min_deviation,
        min_witness_k: r.min_witness_k,
        max_deviation: r.max_deviation,
        max_witness_k: r.max_witness_k,
        floor: r.floor,
        grid_insufficient: r.grid_insufficient,
        separation_ok: r.separation_ok,
    })
}

/// Names of the built-in acceptance checks, in run order.
#[pyfunction]
fn check_names() -> Vec<&'static str> {
    selftest::CHECK_NAMES.to_vec()
}

/// Runs one built-in check; returns `(passed, summary_line)`.
#[pyfunction]
#[pyo3(signature = (name, *, rel_tol=None, abs_tol=None, max_subdivisions=None, tail_cutoff=None))]
fn run_check(
    name: &str,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<u32>,
    tail_cutoff: Option<f64>,
) -> PyResult<(bool, String)> {
    let cfg = quad_config(rel_tol, abs_tol, max_subdivisions, tail_cutoff);
    let outcome = selftest::run_check(name, &cfg).map_err(to_py_err)?;
    Ok((outcome.passed, outcome.line()))
}

#[pymodule]
fn qfourier_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensity>()?;
    m.add_class::<PyTransformSample>()?;
    m.add_class::<PyRecoveryPoint>()?;
    m.add_class::<PyRecoveryReport>()?;
    m.add_class::<PyClassProbe>()?;
    m.add_class::<PyCollapseReport>()?;
    m.add_class::<PySeparationReport>()?;
    m.add_function(wrap_pyfunction!(q_exp, m)?)?;
    m.add_function(wrap_pyfunction!(hilhorst_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(solve_b_for_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(qft, m)?)?;
    m.add_function(wrap_pyfunction!(transform_batch, m)?)?;
    m.add_function(wrap_pyfunction!(ft_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(hilhorst_uts_closed, m)?)?;
    m.add_function(wrap_pyfunction!(hilhorst_full_closed, m)?)?;
    m.add_function(wrap_pyfunction!(roundtrip, m)?)?;
    m.add_function(wrap_pyfunction!(build_class, m)?)?;
    m.add_function(wrap_pyfunction!(verify_collapse, m)?)?;
    m.add_function(wrap_pyfunction!(verify_separation, m)?)?;
    m.add_function(wrap_pyfunction!(check_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    Ok(())
}
