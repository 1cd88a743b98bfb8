//! Catalog of admissible densities on the real line.
//!
//! The centerpiece is the power-law family `f(x) = (lambda/x)^beta` on
//! `[a, b]` with `beta = 1/(q-1)` and `lambda` fixed by normalization.
//! Its defining property: `x * f(x)^{q-1} = lambda` identically on the
//! support, so the diagonal transform depends on the family only through
//! `lambda` — distinct `(a, b)` members with equal `lambda` are
//! transform-equivalent, which the equivalence module exploits.
//!
//! Two more variants round out the catalog: a numerically normalized
//! q-Gaussian-shaped density (unbounded support, power-law tails for
//! `q > 1`) and a tabulated density with linear interpolation (compact
//! support, loaded from CSV).

use crate::error::{Error, Result};
use crate::qkernel::DeformationParameter;
use crate::quad::{integrate_finite, integrate_semi_infinite, QuadratureConfig};

/// Support of a density: the exact interval outside which it vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// Exactly zero outside `[lo, hi]`.
    Compact { lo: f64, hi: f64 },
    /// Positive on the whole line (integrable tails).
    RealLine,
}

/// One member of the power-law family: `(lambda/x)^beta` on `[a, b]`,
/// zero outside, with `beta` and `lambda` derived from `(a, b, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilhorstFamily {
    pub a: f64,
    pub b: f64,
    pub q: DeformationParameter,
    /// Normalization scale; the family's whole identity under the
    /// diagonal transform.
    pub lambda: f64,
    /// Power `1/(q-1)`.
    pub beta: f64,
}

impl HilhorstFamily {
    /// Builds the member on `[a, b]` at index `q`, deriving `lambda` and
    /// `beta`. Requires `0 < a < b` and `1 < q < 2` (`q = 1` sends `beta`
    /// to infinity).
    pub fn new(a: f64, b: f64, q: DeformationParameter) -> Result<Self> {
        let lambda = hilhorst_lambda(a, b, q)?;
        Ok(Self {
            a,
            b,
            q,
            lambda,
            beta: 1.0 / (q.value() - 1.0),
        })
    }

    /// `(lambda/x)^beta` on `[a, b]` (endpoints included), zero outside.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            0.0
        } else {
            (self.lambda / x).powf(self.beta)
        }
    }
}

/// Normalization scale of the power-law member on `[a, b]` at index `q`:
/// `[((q-1)/(2-q)) (a^{(q-2)/(q-1)} - b^{(q-2)/(q-1)})]^{1-q}`.
pub fn hilhorst_lambda(a: f64, b: f64, q: DeformationParameter) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a <= 0.0 {
        return Err(Error::InvalidDensity(format!(
            "support must satisfy 0 < a < b with finite endpoints, got a={a}, b={b}"
        )));
    }
    if a >= b {
        return Err(Error::InvalidDensity(format!(
            "support left end must lie strictly below the right end, got a={a}, b={b}"
        )));
    }
    let qv = q.value();
    if qv == 1.0 {
        return Err(Error::InvalidDensity(
            "q = 1 is not admissible for the power-law family (the exponent 1/(q-1) diverges)"
                .into(),
        ));
    }
    let mu = (qv - 2.0) / (qv - 1.0); // negative for q in (1,2)
    let bracket = (qv - 1.0) / (2.0 - qv) * (a.powf(mu) - b.powf(mu));
    Ok(bracket.powf(1.0 - qv))
}

/// Tabulated density: linear interpolation on a strictly increasing grid,
/// exactly zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::InvalidDensity(format!(
                "grid length {} does not match value length {}",
                xs.len(),
                fs.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidDensity(
                "tabulated density needs at least two grid points".into(),
            ));
        }
        for (&x, &f) in xs.iter().zip(&fs) {
            if !x.is_finite() || !f.is_finite() {
                return Err(Error::InvalidDensity(format!(
                    "non-finite table entry ({x}, {f})"
                )));
            }
            if f < 0.0 {
                return Err(Error::InvalidDensity(format!(
                    "density values must be nonnegative, got f({x}) = {f}"
                )));
            }
        }
        // Entries are finite by now, so >= is a complete ordering test.
        for w in xs.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidDensity(format!(
                    "grid must be strictly increasing, violated at x={} followed by x={}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { xs, fs })
    }

    /// Loads `x,f` rows from a CSV file. The header must be `x,f`; lines
    /// starting with `#` (and blank lines) are skipped; x must increase
    /// strictly and f must be nonnegative.
    pub fn from_csv(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::MalformedTable {
            path: path.into(),
            reason: e.to_string(),
        })?;
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some("x,f") => {}
            other => {
                return Err(Error::MalformedTable {
                    path: path.into(),
                    reason: format!("expected header `x,f`, found {:?}", other.unwrap_or("")),
                });
            }
        }
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut parts = line.split(',');
            let (Some(xs_str), Some(fs_str), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::MalformedTable {
                    path: path.into(),
                    reason: format!("row {} is not two comma-separated fields: {line:?}", i + 1),
                });
            };
            let parse = |s: &str, what: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|_| Error::MalformedTable {
                    path: path.into(),
                    reason: format!("row {}: cannot parse {what} from {s:?}", i + 1),
                })
            };
            xs.push(parse(xs_str, "x")?);
            fs.push(parse(fs_str, "f")?);
        }
        Self::new(xs, fs).map_err(|e| Error::MalformedTable {
            path: path.into(),
            reason: e.to_string(),
        })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().expect("len >= 2"))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        // First index with xs[i] >= x; in range because x <= hi.
        let i = self.xs.partition_point(|&g| g < x);
        if self.xs[i] == x {
            return self.fs[i];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (f0, f1) = (self.fs[i - 1], self.fs[i]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }
}

/// A density on the real line: which variant, plus everything needed to
/// evaluate it pointwise and to hand its exact support to the quadrature.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    Hilhorst(HilhorstFamily),
    /// `norm * [1 + (q-1) x^2 / width^2]^{1/(1-q)}`, with `norm` fixed
    /// once at construction by numeric normalization.
    QGaussian {
        q: DeformationParameter,
        width: f64,
        norm: f64,
    },
    Tabulated(TabulatedDensity),
}

impl DensitySpec {
    pub fn hilhorst(a: f64, b: f64, q: DeformationParameter) -> Result<Self> {
        Ok(Self::Hilhorst(HilhorstFamily::new(a, b, q)?))
    }

    /// Builds the q-Gaussian-shaped density, running the one-time
    /// normalization integral with the given quadrature settings.
    pub fn q_gaussian(q: DeformationParameter, width: f64, cfg: &QuadratureConfig) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidDensity(format!(
                "q-Gaussian width must be positive and finite, got {width}"
            )));
        }
        let shape = move |x: f64| q_gaussian_shape(x, q, width);
        let half = integrate_semi_infinite(
            |x| Ok(num_complex::Complex64::new(shape(x), 0.0)),
            0.0,
            true,
            cfg,
        )?;
        if !half.converged {
            return Err(Error::QuadratureDidNotConverge {
                estimate: half.abs_err_estimate,
                subdivisions: half.subdivisions_used,
            });
        }
        // The shape is even; one ray determines the whole integral.
        Ok(Self::QGaussian {
            q,
            width,
            norm: 1.0 / (2.0 * half.value.re),
        })
    }

    pub fn tabulated(t: TabulatedDensity) -> Self {
        Self::Tabulated(t)
    }

    /// The exact support, as handed to the quadrature drivers.
    pub fn support(&self) -> Support {
        match self {
            Self::Hilhorst(fam) => Support::Compact {
                lo: fam.a,
                hi: fam.b,
            },
            Self::QGaussian { .. } => Support::RealLine,
            Self::Tabulated(t) => {
                let (lo, hi) = t.support();
                Support::Compact { lo, hi }
            }
        }
    }

    /// Pointwise evaluation; total on finite inputs, zero outside support.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Hilhorst(fam) => fam.eval(x),
            Self::QGaussian { q, width, norm } => norm * q_gaussian_shape(x, *q, *width),
            Self::Tabulated(t) => t.eval(x),
        }
    }

    /// The deformation index the density itself carries, if any; the
    /// diagonal transform requires one.
    pub fn own_q(&self) -> Option<DeformationParameter> {
        match self {
            Self::Hilhorst(fam) => Some(fam.q),
            Self::QGaussian { q, .. } => Some(*q),
            Self::Tabulated(_) => None,
        }
    }

    /// Short variant tag used in output-file config echoes.
    pub fn describe(&self) -> String {
        match self {
            Self::Hilhorst(fam) => format!(
                "hilhorst:a={},b={},q={} (lambda={:.16e}, beta={:.16e})",
                fam.a, fam.b, fam.q, fam.lambda, fam.beta
            ),
            Self::QGaussian { q, width, norm } => {
                format!("qgaussian:q={q},width={width} (norm={norm:.16e})")
            }
            Self::Tabulated(t) => {
                let (lo, hi) = t.support();
                format!("tabulated ({} points on [{lo}, {hi}])", t.xs.len())
            }
        }
    }
}

/// Unnormalized q-Gaussian shape `[1 + (q-1) x^2 / width^2]^{1/(1-q)}`,
/// the deformed exponential of `-x^2/width^2` (real arguments keep the
/// base at or above 1, so no branch questions arise).
fn q_gaussian_shape(x: f64, q: DeformationParameter, width: f64) -> f64 {
    let t = (x / width) * (x / width);
    if q.is_classical() {
        (-t).exp()
    } else {
        let qv = q.value();
        (1.0 + (qv - 1.0) * t).powf(1.0 / (1.0 - qv))
    }
}

/// Pointwise density evaluation (zero outside support).
pub fn density_eval(d: &DensitySpec, x: f64) -> f64 {
    d.eval(x)
}

/// Inverts the `lambda(a, b, q)` map in `b` by bracketed bisection:
/// returns the `b > a` whose member has the requested `lambda`, within
/// relative 1e-12. `lambda` decreases strictly in `b` from `+inf` (at
/// `b -> a`) down to a positive infimum (at `b -> inf`); a target at or
/// below that infimum is reported as unachievable, with the infimum.
pub fn solve_b_for_lambda(
    a: f64,
    lambda_target: f64,
    q: DeformationParameter,
) -> Result<f64> {
    if !(lambda_target > 0.0 && lambda_target.is_finite()) {
        return Err(Error::InvalidDensity(format!(
            "target lambda must be positive and finite, got {lambda_target}"
        )));
    }
    let qv = q.value();
    if qv == 1.0 {
        return Err(Error::InvalidDensity(
            "q = 1 is not admissible for the power-law family (the exponent 1/(q-1) diverges)"
                .into(),
        ));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidDensity(format!(
            "support left end must be positive and finite, got a={a}"
        )));
    }
    let mu = (qv - 2.0) / (qv - 1.0);
    let infimum = ((qv - 1.0) / (2.0 - qv) * a.powf(mu)).powf(1.0 - qv);
    if lambda_target <= infimum {
        return Err(Error::UnachievableLambda {
            a,
            requested: lambda_target,
            infimum,
        });
    }

    // Bracket: lambda(b) falls below the target for large enough b.
    let mut lo = a * (1.0 + 1e-14);
    let mut hi = 2.0 * a;
    let mut guard = 0;
    while hilhorst_lambda(a, hi, q)? > lambda_target {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            // Unreachable for targets strictly above the infimum, kept as
            // a defensive stop.
            return Err(Error::UnachievableLambda {
                a,
                requested: lambda_target,
                infimum,
            });
        }
    }

    // Bisect all the way to floating-point resolution: stopping early on
    // a lambda tolerance would leave b imprecise wherever lambda is flat
    // in b, breaking the b-side round trip.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval exhausted at floating-point resolution
        }
        if hilhorst_lambda(a, mid, q)? > lambda_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lam_lo = hilhorst_lambda(a, lo, q)?;
    let lam_hi = hilhorst_lambda(a, hi, q)?;
    let b = if (lam_lo - lambda_target).abs() <= (lam_hi - lambda_target).abs() {
        lo
    } else {
        hi
    };
    // The bracket invariant lambda(lo) > target >= lambda(hi) pins the
    // root between adjacent doubles; this check only guards against a
    // broken monotonicity assumption.
    let lam = hilhorst_lambda(a, b, q)?;
    if (lam - lambda_target).abs() <= 1e-9 * lambda_target {
        Ok(b)
    } else {
        Err(Error::InvalidDensity(format!(
            "bisection for b stalled at b={b} with lambda={lam} (target {lambda_target})"
        )))
    }
}

/// Integrates the density over its declared support and returns the
/// value; errors if the quadrature failed to converge.
pub fn verify_normalization(d: &DensitySpec, cfg: &QuadratureConfig) -> Result<f64> {
    let integrand = |x: f64| Ok(num_complex::Complex64::new(d.eval(x), 0.0));
    let result = match d.support() {
        Support::Compact { lo, hi } => integrate_finite(integrand, lo, hi, cfg)?,
        Support::RealLine => {
            let right = integrate_semi_infinite(integrand, 0.0, true, cfg)?;
            let left = integrate_semi_infinite(integrand, 0.0, false, cfg)?;
            crate::quad::IntegralResult {
                value: left.value + right.value,
                abs_err_estimate: left.abs_err_estimate + right.abs_err_estimate,
                subdivisions_used: left.subdivisions_used + right.subdivisions_used,
                converged: left.converged && right.converged,
            }
        }
    };
    if !result.converged {
        return Err(Error::QuadratureDidNotConverge {
            estimate: result.abs_err_estimate,
            subdivisions: result.subdivisions_used,
        });
    }
    Ok(result.value.re)
}
