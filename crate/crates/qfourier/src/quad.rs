//! Adaptive quadrature for complex-valued integrands on finite and
//! semi-infinite real intervals.
//!
//! The finite-interval driver uses the embedded Gauss(7)/Kronrod(15) pair
//! with the classical QUADPACK error rescaling, refining the worst segment
//! first. Evaluation points are strictly interior, so integrands with
//! endpoint jumps (compact-support densities) are safe to integrate on
//! their exact support.
//!
//! The semi-infinite driver walks outward in panels of doubling length,
//! integrating each panel with the finite driver, and stops once two
//! consecutive panels contribute below a relative tail threshold.
//!
//! Integrands return `Result`, so domain errors (for example a branch-cut
//! hit inside the transform kernel) abort the integration instead of being
//! silently absorbed into the sum.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and budgets for the adaptive drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative tolerance on the accumulated error estimate.
    pub rel_tol: f64,
    /// Absolute tolerance on the accumulated error estimate.
    pub abs_tol: f64,
    /// Maximum number of bisections (finite) or panel doublings (semi-infinite).
    pub max_subdivisions: u32,
    /// Relative tail-contribution threshold for semi-infinite truncation.
    pub tail_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            tail_cutoff: 1e-14,
        }
    }
}

impl QuadratureConfig {
    /// Checks the configuration invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidQuadratureConfig(format!(
                "rel_tol must be positive and finite, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidQuadratureConfig(format!(
                "abs_tol must be positive and finite, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidQuadratureConfig(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.tail_cutoff > 0.0 && self.tail_cutoff.is_finite()) {
            return Err(Error::InvalidQuadratureConfig(format!(
                "tail_cutoff must be positive and finite, got {}",
                self.tail_cutoff
            )));
        }
        Ok(())
    }
}

/// Outcome of an integration: value, error estimate, and work accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    /// The approximated integral.
    pub value: Complex64,
    /// Estimated absolute error of `value` (always nonnegative).
    pub abs_err_estimate: f64,
    /// Bisections performed (summed across panels for the semi-infinite driver).
    pub subdivisions_used: u32,
    /// Whether the error estimate met the requested tolerance.
    pub converged: bool,
}

// Kronrod-15 abscissae on [-1, 1] (positive half; the rule is symmetric).
// Odd indices 1, 3, 5 and the center are the embedded Gauss-7 nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

// Gauss-7 weights, matching XGK indices 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

// Kronrod-15 weights, matching XGK index for index.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// QUADPACK's empirical error rescaling: the raw Gauss/Kronrod difference
/// is sharpened by `(200 err / resasc)^{3/2}` when that is a contraction,
/// and floored at 50 ulps of the L1 magnitude `resabs`.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// One segment of the adaptive partition, carrying its local rule output.
#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    resabs: f64,
    /// Set when the segment can no longer be bisected in floating point.
    frozen: bool,
}

/// Applies the G7/K15 pair on `[a, b]`.
fn gk15<F>(f: &F, a: f64, b: f64) -> Result<Segment>
where
    F: Fn(f64) -> Result<Complex64> + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center)?;
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];

    let mut res_gauss = fc * WG[3];
    let mut res_kronrod = fc * WGK[7];
    let mut resabs = res_kronrod.norm();

    // Nodes shared with the Gauss rule.
    for (j, &wg) in WG.iter().enumerate().take(3) {
        let jtw = 2 * j + 1;
        let offset = half * XGK[jtw];
        let f1 = f(center - offset)?;
        let f2 = f(center + offset)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        let fsum = f1 + f2;
        res_gauss += fsum * wg;
        res_kronrod += fsum * WGK[jtw];
        resabs += WGK[jtw] * (f1.norm() + f2.norm());
    }

    // Kronrod-only nodes.
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let offset = half * XGK[jtwm1];
        let f1 = f(center - offset)?;
        let f2 = f(center + offset)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        let fsum = f1 + f2;
        res_kronrod += fsum * WGK[jtwm1];
        resabs += WGK[jtwm1] * (f1.norm() + f2.norm());
    }

    let mean = res_kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let value = res_kronrod * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let err = rescale_error(((res_kronrod - res_gauss) * half).norm(), resabs, resasc);

    Ok(Segment {
        a,
        b,
        value,
        err,
        resabs,
        frozen: false,
    })
}

/// The tolerance actually demanded of the accumulated error estimate:
/// the tighter of the absolute and relative requests, floored at the
/// machine-precision level of the integrand's L1 magnitude.
fn effective_target(cfg: &QuadratureConfig, total_norm: f64, resabs_total: f64) -> f64 {
    let requested = cfg.abs_tol.min(cfg.rel_tol * total_norm);
    requested.max(50.0 * f64::EPSILON * resabs_total)
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
///
/// Bisects the segment with the largest local error estimate until the
/// summed estimate meets `min(abs_tol, rel_tol * |value|)` (floored at
/// machine precision) or the subdivision budget is spent, in which case
/// the result is returned with `converged = false`. Evaluation points are
/// strictly interior to every segment.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    cfg.validate()?;
    if !a.is_finite() {
        return Err(Error::NonFinite {
            what: "integration endpoint a",
            value: a,
        });
    }
    if !b.is_finite() {
        return Err(Error::NonFinite {
            what: "integration endpoint b",
            value: b,
        });
    }
    if a >= b {
        return Err(Error::InvalidInterval { a, b });
    }

    // Segments stay sorted by left endpoint; splitting preserves the order,
    // so the final left-to-right summation is reproducible run to run.
    let mut segments = vec![gk15(&f, a, b)?];
    let mut splits: u32 = 0;

    let (value, err, converged) = loop {
        let mut total = Complex64::new(0.0, 0.0);
        let mut err_total = 0.0;
        let mut resabs_total = 0.0;
        for s in &segments {
            total += s.value;
            err_total += s.err;
            resabs_total += s.resabs;
        }
        let target = effective_target(cfg, total.norm(), resabs_total);
        if err_total <= target {
            break (total, err_total, true);
        }
        if splits >= cfg.max_subdivisions {
            break (total, err_total, false);
        }

        // Worst splittable segment; ties resolve to the leftmost.
        let mut worst: Option<usize> = None;
        for (i, s) in segments.iter().enumerate() {
            if s.frozen {
                continue;
            }
            match worst {
                Some(w) if segments[w].err >= s.err => {}
                _ => worst = Some(i),
            }
        }
        let Some(i) = worst else {
            // Nothing left to bisect at floating-point resolution.
            break (total, err_total, false);
        };

        let seg = segments[i];
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            segments[i].frozen = true;
            continue;
        }
        let left = gk15(&f, seg.a, mid)?;
        let right = gk15(&f, mid, seg.b)?;
        segments[i] = left;
        segments.insert(i + 1, right);
        splits += 1;
    };

    Ok(IntegralResult {
        value,
        abs_err_estimate: err,
        subdivisions_used: splits,
        converged,
    })
}

/// Integral of `f` over the ray from `a` toward `+inf` or `-inf`.
///
/// Walks outward in panels whose lengths double (1, 2, 4, ...), each panel
/// integrated by [`integrate_finite`], and stops after two consecutive
/// panels contribute below `tail_cutoff` relative to the running total.
/// A tail that never falls below the threshold within `max_subdivisions`
/// panels is reported as an error (the integrand is then not usefully
/// integrable at the working precision).
pub fn integrate_semi_infinite<F>(
    f: F,
    a: f64,
    toward_plus_infinity: bool,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    cfg.validate()?;
    if !a.is_finite() {
        return Err(Error::NonFinite {
            what: "ray endpoint a",
            value: a,
        });
    }

    let mut total = Complex64::new(0.0, 0.0);
    let mut err_total = 0.0;
    let mut subdivisions: u32 = 0;
    let mut all_converged = true;
    let mut quiet_panels = 0u32;
    let mut near = a;
    let mut length = 1.0f64;
    let mut last_metric = f64::INFINITY;

    for panel in 0..cfg.max_subdivisions {
        let far = if toward_plus_infinity {
            near + length
        } else {
            near - length
        };
        if !far.is_finite() {
            return Err(Error::TailDidNotDecay {
                panels: panel,
                last: last_metric,
            });
        }
        let (lo, hi) = if toward_plus_infinity {
            (near, far)
        } else {
            (far, near)
        };
        let part = integrate_finite(&f, lo, hi, cfg)?;
        total += part.value;
        err_total += part.abs_err_estimate;
        subdivisions = subdivisions.saturating_add(part.subdivisions_used);
        all_converged &= part.converged;

        let metric = part.value.norm() + part.abs_err_estimate;
        last_metric = metric;
        let threshold = cfg.tail_cutoff * total.norm();
        if metric <= threshold {
            quiet_panels += 1;
            if quiet_panels >= 2 {
                return Ok(IntegralResult {
                    value: total,
                    abs_err_estimate: err_total,
                    subdivisions_used: subdivisions,
                    converged: all_converged,
                });
            }
        } else {
            quiet_panels = 0;
        }

        near = far;
        length *= 2.0;
    }

    Err(Error::TailDidNotDecay {
        panels: cfg.max_subdivisions,
        last: last_metric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(f: impl Fn(f64) -> Complex64) -> impl Fn(f64) -> Result<Complex64> {
        move |x| Ok(f(x))
    }

    fn re(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<Complex64> {
        move |x| Ok(Complex64::new(f(x), 0.0))
    }

    #[test]
    fn rejects_bad_intervals_and_configs() {
        let cfg = QuadratureConfig::default();
        assert!(integrate_finite(re(|x| x), 1.0, 1.0, &cfg).is_err());
        assert!(integrate_finite(re(|x| x), 2.0, 1.0, &cfg).is_err());
        assert!(integrate_finite(re(|x| x), f64::NAN, 1.0, &cfg).is_err());
        let bad = QuadratureConfig {
            rel_tol: 0.0,
            ..cfg
        };
        assert!(integrate_finite(re(|x| x), 0.0, 1.0, &bad).is_err());
        let bad = QuadratureConfig {
            max_subdivisions: 0,
            ..cfg
        };
        assert!(integrate_finite(re(|x| x), 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let r = integrate_finite(re(|x| x * x), 0.0, 1.0, &cfg).unwrap();
        assert!(r.converged);
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-14);
        assert!(r.value.im.abs() < 1e-15);
    }

    #[test]
    fn complex_exponential_on_zero_pi() {
        let cfg = QuadratureConfig::default();
        let r = integrate_finite(ok(|x| Complex64::new(0.0, x).exp()), 0.0, std::f64::consts::PI, &cfg)
            .unwrap();
        assert!(r.converged);
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn hilhorst_normalization_integral() {
        // 2/x^2 on [1,2] is the normalization integral of the power-law
        // density with a=1, b=2, q=1.5.
        let cfg = QuadratureConfig::default();
        let r = integrate_finite(re(|x| 2.0 / (x * x)), 1.0, 2.0, &cfg).unwrap();
        assert!(r.converged);
        assert!((r.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_ray() {
        let cfg = QuadratureConfig::default();
        let r = integrate_semi_infinite(re(|x| (-x).exp()), 0.0, true, &cfg).unwrap();
        assert!(r.converged);
        assert!((r.value.re - 1.0).abs() < 1e-12);
        assert!(r.value.im.abs() < 1e-13);
    }

    #[test]
    fn oscillatory_decaying_ray() {
        let cfg = QuadratureConfig::default();
        let r = integrate_semi_infinite(
            ok(|x| (Complex64::new(-1.0, 1.0) * x).exp()),
            0.0,
            true,
            &cfg,
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value - Complex64::new(0.5, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn negative_direction_ray() {
        let cfg = QuadratureConfig::default();
        let r = integrate_semi_infinite(re(|x| x.exp()), 0.0, false, &cfg).unwrap();
        assert!(r.converged);
        assert!((r.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compact_support_ray_equals_finite_integral() {
        let cfg = QuadratureConfig::default();
        let f = re(|x| if x <= 2.0 { x * x } else { 0.0 });
        let ray = integrate_semi_infinite(&f, 0.0, true, &cfg).unwrap();
        let finite = integrate_finite(&f, 0.0, 2.0, &cfg).unwrap();
        assert!(ray.converged);
        assert!((ray.value - finite.value).norm() < 1e-12);
        assert!((ray.value.re - 8.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn non_convergence_is_flagged_not_fabricated() {
        // A budget of one bisection cannot resolve a sharp peak.
        let cfg = QuadratureConfig {
            max_subdivisions: 1,
            ..QuadratureConfig::default()
        };
        let r = integrate_finite(re(|x| 1.0 / (1e-6 + x * x)), -1.0, 1.0, &cfg).unwrap();
        assert!(!r.converged);
        assert!(r.abs_err_estimate > 0.0);
    }

    #[test]
    fn divergent_tail_errors_out() {
        let cfg = QuadratureConfig {
            max_subdivisions: 40,
            ..QuadratureConfig::default()
        };
        let err = integrate_semi_infinite(re(|_| 1.0), 0.0, true, &cfg).unwrap_err();
        assert!(matches!(err, Error::TailDidNotDecay { .. }));
    }

    #[test]
    fn integrand_errors_propagate() {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| -> Result<Complex64> {
            if x > 0.5 {
                Err(Error::BranchCut(Complex64::new(-1.0, 0.0)))
            } else {
                Ok(Complex64::new(1.0, 0.0))
            }
        };
        assert!(integrate_finite(f, 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn linearity_within_error_estimates() {
        let cfg = QuadratureConfig::default();
        let f = ok(|x| Complex64::new((3.0 * x).sin(), x * x));
        let g = ok(|x| Complex64::new((-0.5 * x).exp(), (2.0 * x).cos()));
        let alpha = Complex64::new(2.0, -1.0);
        let combined = integrate_finite(
            |x| Ok(alpha * f(x)? + g(x)?),
            0.0,
            2.0,
            &cfg,
        )
        .unwrap();
        let rf = integrate_finite(&f, 0.0, 2.0, &cfg).unwrap();
        let rg = integrate_finite(&g, 0.0, 2.0, &cfg).unwrap();
        let budget = alpha.norm() * rf.abs_err_estimate + rg.abs_err_estimate
            + combined.abs_err_estimate
            + 1e-13;
        assert!((combined.value - (alpha * rf.value + rg.value)).norm() <= budget);
    }

    #[test]
    fn error_estimates_are_honest_on_calibration_suite() {
        // Integrals with closed forms; the actual error must not exceed
        // ten times the reported estimate.
        let cfg = QuadratureConfig::default();
        let pi = std::f64::consts::PI;
        let e = std::f64::consts::E;
        let cases: Vec<(IntegralResult, Complex64)> = vec![
            (
                integrate_finite(re(|x| x * x), 0.0, 1.0, &cfg).unwrap(),
                Complex64::new(1.0 / 3.0, 0.0),
            ),
            (
                integrate_finite(ok(|x| Complex64::new(0.0, x).exp()), 0.0, pi, &cfg).unwrap(),
                Complex64::new(0.0, 2.0),
            ),
            (
                integrate_finite(re(|x| 2.0 / (x * x)), 1.0, 2.0, &cfg).unwrap(),
                Complex64::new(1.0, 0.0),
            ),
            (
                integrate_finite(re(|x| x.exp()), 0.0, 1.0, &cfg).unwrap(),
                Complex64::new(e - 1.0, 0.0),
            ),
            (
                integrate_finite(re(|x| x.sin()), 0.0, 2.0 * pi, &cfg).unwrap(),
                Complex64::new(0.0, 0.0),
            ),
            (
                integrate_finite(re(|x| (50.0 * x).cos()), 0.0, 1.0, &cfg).unwrap(),
                Complex64::new((50.0f64).sin() / 50.0, 0.0),
            ),
            (
                integrate_finite(re(|x| 1.0 / (1.0 + x * x)), -1.0, 1.0, &cfg).unwrap(),
                Complex64::new(pi / 2.0, 0.0),
            ),
            (
                // d/dx e^{i x^2} = 2 i x e^{i x^2}
                integrate_finite(ok(|x| x * Complex64::new(0.0, x * x).exp()), 0.0, 3.0, &cfg)
                    .unwrap(),
                (Complex64::new(0.0, 9.0).exp() - 1.0) / Complex64::new(0.0, 2.0),
            ),
            (
                integrate_finite(re(|x| x.ln()), 1.0, 2.0, &cfg).unwrap(),
                Complex64::new(2.0 * (2.0f64).ln() - 1.0, 0.0),
            ),
            (
                integrate_finite(re(|x| x.powi(20)), 0.0, 1.0, &cfg).unwrap(),
                Complex64::new(1.0 / 21.0, 0.0),
            ),
            (
                integrate_semi_infinite(re(|x| (-x).exp()), 0.0, true, &cfg).unwrap(),
                Complex64::new(1.0, 0.0),
            ),
            (
                integrate_semi_infinite(
                    ok(|x| (Complex64::new(-1.0, 1.0) * x).exp()),
                    0.0,
                    true,
                    &cfg,
                )
                .unwrap(),
                Complex64::new(0.5, 0.5),
            ),
            (
                integrate_semi_infinite(re(|x| 1.0 / (1.0 + x * x)), 0.0, true, &cfg).unwrap(),
                Complex64::new(pi / 2.0, 0.0),
            ),
        ];
        assert!(cases.len() >= 10);
        for (i, (r, exact)) in cases.iter().enumerate() {
            assert!(r.converged, "case {i} did not converge");
            let actual = (r.value - exact).norm();
            assert!(
                actual <= 10.0 * r.abs_err_estimate.max(f64::EPSILON),
                "case {i}: actual error {actual:.3e} exceeds 10x estimate {:.3e}",
                r.abs_err_estimate
            );
        }
    }

    #[test]
    fn real_integrand_has_negligible_imaginary_part() {
        let cfg = QuadratureConfig::default();
        let r = integrate_finite(re(|x| (x + 1.0).sqrt()), 0.0, 4.0, &cfg).unwrap();
        assert!(r.value.im.abs() < cfg.abs_tol);
    }
}
