//! Built-in acceptance checks: eight verifications of the library's
//! headline claims, runnable from the CLI (`selftest`) and reused by the
//! integration test suite. Each check produces one pass/fail line and
//! takes the quadrature configuration as an input so that tolerance
//! injection exercises the failure paths.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::densities::{hilhorst_lambda, verify_normalization, DensitySpec, HilhorstFamily};
use crate::equivalence::{build_class, verify_collapse, verify_separation};
use crate::error::{Error, Result};
use crate::hyp2f1::{gauss_2f1, Hyp2F1Params};
use crate::inverse::{roundtrip, InverseConfig};
use crate::qkernel::DeformationParameter;
use crate::quad::QuadratureConfig;
use crate::transform::{ft_diagonal, hilhorst_full_closed, hilhorst_uts_closed, qft_complex, qft_real};

/// Names of the built-in checks, in execution order.
pub const CHECK_NAMES: [&str; 8] = [
    "normalization",
    "diagonal-closed-form",
    "class-collapse",
    "full-closed-form-vs-quadrature",
    "class-separation",
    "classical-limit",
    "inverse-recovery",
    "hypergeometric-suite",
];

/// Result of one acceptance check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    /// The one-line pass/fail form printed by the CLI.
    pub fn line(&self) -> String {
        format!(
            "[{}] {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail,
    }
}

/// Wraps a check body so numeric errors become failure lines instead of
/// aborting the suite.
fn guarded(name: &'static str, body: impl FnOnce() -> Result<CheckOutcome>) -> CheckOutcome {
    match body() {
        Ok(o) => o,
        Err(e) => outcome(name, false, format!("error: {e}")),
    }
}

fn dp(q: f64) -> DeformationParameter {
    DeformationParameter::new(q).expect("check uses an in-range index")
}

fn reference_density() -> Result<DensitySpec> {
    DensitySpec::hilhorst(1.0, 2.0, dp(1.5))
}

fn grid_21() -> Vec<f64> {
    (0..21).map(|i| -5.0 + 0.5 * i as f64).collect()
}

/// Normalization of 20 pseudorandom power-law families (fixed seed):
/// the integral of each density must be 1 within 1e-9.
fn check_normalization(qcfg: &QuadratureConfig) -> CheckOutcome {
    const NAME: &str = "normalization";
    guarded(NAME, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
        let mut worst = 0.0_f64;
        for _ in 0..20 {
            let a = rng.random_range(0.1..5.0);
            let ratio = rng.random_range(1.1..50.0);
            let q = rng.random_range(1.05..1.9);
            let d = DensitySpec::hilhorst(a, a * ratio, dp(q))?;
            let total = verify_normalization(&d, qcfg)?;
            worst = worst.max((total - 1.0).abs());
        }
        Ok(outcome(
            NAME,
            worst <= 1e-9,
            format!("max |integral(f) - 1| = {worst:.3e} over 20 random families (tol 1e-9)"),
        ))
    })
}

/// Diagonal transform of the (1,2,1.5) member vs the closed form on 21
/// real k in [-5, 5], absolute tolerance 1e-6.
fn check_diagonal_closed_form(qcfg: &QuadratureConfig) -> CheckOutcome {
    const NAME: &str = "diagonal-closed-form";
    guarded(NAME, || {
        let d = reference_density()?;
        let lambda = hilhorst_lambda(1.0, 2.0, dp(1.5))?;
        let mut worst = 0.0_f64;
        for k in grid_21() {
            let kc = Complex64::new(k, 0.0);
            let numeric = ft_diagonal(&d, kc, qcfg)?;
            let closed = hilhorst_uts_closed(lambda, 1.5, kc)?;
            worst = worst.max((numeric.value - closed).norm());
        }
        Ok(outcome(
            NAME,
            worst <= 1e-6,
            format!("max |F_T - closed form| = {worst:.3e} on 21 k-points (tol 1e-6)"),
        ))
    })
}

/// Within-class collapse: members (1,2) and (1.5,6) share one invariant;
/// their diagonal transforms agree to 1e-6 across the grid.
fn check_class_collapse(qcfg: &QuadratureConfig) -> CheckOutcome {
    const NAME: &str = "class-collapse";
    guarded(NAME, || {
        let lambda = hilhorst_lambda(1.0, 2.0, dp(1.5))?;
        let probe = build_class(dp(1.5), lambda, &[1.0, 1.5])?;
        let report = verify_collapse(&probe, &grid_21(), qcfg)?;
        Ok(outcome(
            NAME,
            report.max_pairwise_deviation <= 1e-6,
            format!(
                "max within-class |F_T difference| = {:.3e} for members (1,2) and (1.5,6) (tol 1e-6)",
                report.max_pairwise_deviation
            ),
        ))
    })
}

/// Hypergeometric closed form vs direct quadrature at both regimes and
/// three complex k, relative tolerance 1e-6 (corrected-prefactor
/// reading).
fn check_full_closed_form(qcfg: &QuadratureConfig) -> CheckOutcome {
    const NAME: &str = "full-closed-form-vs-quadrature";
    guarded(NAME, || {
        let fam = HilhorstFamily::new(1.0, 2.0, dp(1.5))?;
        let d = reference_density()?;
        let ks = [
            Complex64::new(0.0, 0.5),
            Complex64::new(0.0, 2.0),
            Complex64::new(1.0, 1.0),
        ];
        let mut worst = 0.0_f64;
        for qp in [1.3, 1.7] {
            for &k in &ks {
                let closed = hilhorst_full_closed(&fam, k, qp, false)?;
                let quad = qft_complex(&d, k, qp, qcfg)?;
                worst = worst.max((closed - quad.value).norm() / quad.value.norm());
            }
        }
        Ok(outcome(
            NAME,
            worst <= 1e-6,
            format!(
                "max relative deviation = {worst:.3e} over q' in {{1.3, 1.7}} x 3 complex k (tol 1e-6)"
            ),
        ))
    })
}

/// Between-class separation via the closed diagonal form: invariants
/// sqrt(2) and 2 at q=1.5 differ by at least 0.1 somewhere on [0.1, 5].
fn check_class_separation(_qcfg: &QuadratureConfig) -> CheckOutcome {
    const NAME: &str = "class-separation";
    guarded(NAME, || {
        let lambda1 = hilhorst_lambda(1.0, 2.0, dp(1.5))?;
        let p1 = build_class(dp(1.5), lambda1, &[1.0, 1.5])?;
        let p2 = build_class(dp(1.5), 2.0, &[1.0, 1.5])?;
        let grid: Vec<f64> = (0..50).map(|i| 0.1 + i as f64 * (4.9 / 49.0)).collect();
        let report = verify_separation(&p1, &p2, &grid)?;
        Ok(outcome(
            NAME,
            report.max_deviation >= 0.1 && report.separation_ok,
            format!(
                "max |F_UTS difference| = {:.4} at k = {:.2} for invariants sqrt(2) vs 2 (floor 0.1)",
                report.max_deviation, report.max_witness_k
            ),
        ))
    })
}

/// Classical limit: the transform at index 1+1e-8 matches the ordinary
/// Fourier integral (independent oracle values) to 1e-6.
fn check_classical_limit(qcfg: &QuadratureConfig) -> CheckOutcome {
    const NAME: &str = "classical-limit";
    guarded(NAME, || {
        let d = reference_density()?;
        // Frozen values of the ordinary characteristic function of the
        // (1,2,1.5) member, from an independent oscillatory-quadrature
        // calibration.
        let oracle = [
            (0.5, Complex64::new(0.76188716558848939, 0.63256809410809053)),
            (1.0, Complex64::new(0.17809163541239815, 0.94479835453790504)),
            (3.0, Complex64::new(-0.39636541953748661, -0.56446666508882441)),
        ];
        let mut worst = 0.0_f64;
        for (k, want) in oracle {
            let got = qft_real(&d, k, 1.0 + 1e-8, qcfg)?;
            worst = worst.max((got.value - want).norm());
        }
        Ok(outcome(
            NAME,
            worst <= 1e-6,
            format!(
                "max |F(q'=1+1e-8) - classical oracle| = {worst:.3e} at k in {{0.5, 1, 3}} (tol 1e-6)"
            ),
        ))
    })
}

/// Inverse recovery: pointwise relative error at k_max=400 within 5e-3
/// at the three midpoints, and the aggregate error non-increasing as
/// k_max doubles (10% slack).
fn check_inverse_recovery(qcfg: &QuadratureConfig) -> CheckOutcome {
    const NAME: &str = "inverse-recovery";
    guarded(NAME, || {
        let d = reference_density()?;
        let mut l1s = Vec::new();
        let mut final_report = None;
        for k_max in [50.0, 100.0, 200.0, 400.0] {
            let cfg = InverseConfig {
                epsilon: 1e-6,
                k_max,
                n_k: 8192,
                x_points: vec![1.25, 1.5, 1.75],
            };
            let report = roundtrip(&d, &cfg, qcfg)?;
            l1s.push(report.l1_error);
            final_report = Some(report);
        }
        let report = final_report.expect("four k_max values were run");
        let max_rel = report
            .points
            .iter()
            .map(|p| p.abs_err / p.f_true)
            .fold(0.0_f64, f64::max);
        let max_abs = report
            .points
            .iter()
            .map(|p| p.abs_err)
            .fold(0.0_f64, f64::max);
        let monotone = l1s.windows(2).all(|w| w[1] <= 1.1 * w[0]);
        let l1_str = l1s
            .iter()
            .map(|l| format!("{l:.3e}"))
            .collect::<Vec<_>>()
            .join(" -> ");
        Ok(outcome(
            NAME,
            max_rel <= 5e-3 && monotone,
            format!(
                "k_max=400 max relative error = {max_rel:.3e} (tol 5e-3; max absolute {max_abs:.3e}); L1 over k_max 50..400: {l1_str} ({})",
                if monotone { "non-increasing" } else { "NOT non-increasing" }
            ),
        ))
    })
}

/// Hypergeometric unit suite: logarithmic and binomial identities plus
/// contiguous-relation residuals at 100 pseudorandom well-conditioned
/// points, all to 1e-8 relative.
fn check_hypergeometric_suite(_qcfg: &QuadratureConfig) -> CheckOutcome {
    const NAME: &str = "hypergeometric-suite";
    guarded(NAME, || {
        let one = Complex64::new(1.0, 0.0);
        // 2F1(1,1;2;1/2) = 2 ln 2.
        let z = Complex64::new(0.5, 0.0);
        let log_id = gauss_2f1(&Hyp2F1Params::real(1.0, 1.0, 2.0)?, z)?;
        let want = Complex64::new(2.0 * std::f64::consts::LN_2, 0.0);
        let log_dev = (log_id - want).norm() / want.norm();
        // 2F1(a,b;b;z) = (1-z)^{-a}.
        let mut binom_dev = 0.0_f64;
        for (a, b, z) in [
            (0.7, 1.9, Complex64::new(0.3, 0.4)),
            (-1.5, 2.4, Complex64::new(-0.8, 0.2)),
            (2.2, 0.6, Complex64::new(0.1, -0.7)),
        ] {
            let got = gauss_2f1(&Hyp2F1Params::real(a, b, b)?, z)?;
            let want = (one - z).powc(Complex64::new(-a, 0.0));
            binom_dev = binom_dev.max((got - want).norm() / want.norm());
        }
        // Contiguous relation in c at pseudorandom well-conditioned
        // points (fixed seed):
        // c(c-1)(z-1)F(c-1) + c[c-1-(2c-a-b-1)z]F(c) + (c-a)(c-b)zF(c+1) = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
        let mut contig_dev = 0.0_f64;
        for _ in 0..100 {
            let a = Complex64::new(rng.random_range(0.3..2.5), 0.0);
            let b = Complex64::new(rng.random_range(0.3..2.5), 0.0);
            let c = Complex64::new(
                a.re.max(b.re) + rng.random_range(0.5..2.0),
                0.0,
            );
            let z = Complex64::new(
                rng.random_range(-0.4..0.4),
                rng.random_range(-0.4..0.4),
            );
            let f = |cv: Complex64| gauss_2f1(&Hyp2F1Params { a, b, c: cv }, z);
            let fm = f(c - one)?;
            let f0 = f(c)?;
            let fp = f(c + one)?;
            let t1 = c * (c - one) * (z - one) * fm;
            let t2 = c * (c - one - (2.0 * c - a - b - one) * z) * f0;
            let t3 = (c - a) * (c - b) * z * fp;
            let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(1e-300);
            contig_dev = contig_dev.max((t1 + t2 + t3).norm() / scale);
        }
        let worst = log_dev.max(binom_dev).max(contig_dev);
        Ok(outcome(
            NAME,
            worst <= 1e-8,
            format!(
                "log identity dev {log_dev:.3e}, binomial dev {binom_dev:.3e}, max contiguous residual {contig_dev:.3e} over 100 points (tol 1e-8)"
            ),
        ))
    })
}

/// Runs one named check with the given quadrature configuration.
pub fn run_check(name: &str, qcfg: &QuadratureConfig) -> Result<CheckOutcome> {
    match name {
        "normalization" => Ok(check_normalization(qcfg)),
        "diagonal-closed-form" => Ok(check_diagonal_closed_form(qcfg)),
        "class-collapse" => Ok(check_class_collapse(qcfg)),
        "full-closed-form-vs-quadrature" => Ok(check_full_closed_form(qcfg)),
        "class-separation" => Ok(check_class_separation(qcfg)),
        "classical-limit" => Ok(check_classical_limit(qcfg)),
        "inverse-recovery" => Ok(check_inverse_recovery(qcfg)),
        "hypergeometric-suite" => Ok(check_hypergeometric_suite(qcfg)),
        other => Err(Error::UnknownCheck(other.to_string())),
    }
}

/// Runs the whole suite in order.
pub fn run_all(qcfg: &QuadratureConfig) -> Vec<CheckOutcome> {
    CHECK_NAMES
        .iter()
        .map(|name| run_check(name, qcfg).expect("built-in names are valid"))
        .collect()
}
