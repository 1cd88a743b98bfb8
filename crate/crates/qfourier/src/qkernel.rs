//! q-deformed exponential algebra and the transform integrand kernel.
//!
//! The deformed exponential is `[1 + (1-q) z]^{1/(1-q)}` on the principal
//! branch, reducing to `exp(z)` at `q = 1`. The integrand kernel multiplies
//! a density sample `f(x)` by the deformed exponential of
//! `i k x f(x)^{q'-1}`, which is the building block of the forward
//! transform on both half-lines.
//!
//! Branch policy: the complex power uses the principal logarithm, with the
//! cut on the closed negative real axis. For real `k` and nonnegative
//! densities the base has real part exactly 1, so the cut is never crossed;
//! for complex `k` a base on the cut is reported as an error rather than
//! resolved by a side convention.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Deformation index `q` (or `q'`) restricted to the admissible band `[1, 2)`.
///
/// Construction fails outside the band, so a value of this type certifies
/// its own range. Use [`DeformationParameter::value`] to read it back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationParameter(f64);

impl DeformationParameter {
    /// Validates `1 <= q < 2` (and finiteness) and wraps the value.
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::NonFinite {
                what: "deformation parameter",
                value: q,
            });
        }
        if !(1.0..2.0).contains(&q) {
            return Err(Error::DeformationRange(q));
        }
        Ok(Self(q))
    }

    /// The underlying index.
    pub fn value(self) -> f64 {
        self.0
    }

    /// `true` when the index is exactly the classical limit `q = 1`.
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }
}

impl std::fmt::Display for DeformationParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<f64> for DeformationParameter {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

/// Heaviside step with the closed-at-zero convention `H(0) = 1`.
pub fn heaviside(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `ln(1 + u)` for complex `u`, accurate when `u` is small.
///
/// Decomposes into real parts that avoid forming `1 + u` where its
/// rounding would matter: `|1+u|^2 - 1 = 2 Re(u) + |u|^2` feeds the real
/// `ln_1p`, and the principal argument comes from `atan2`. A bare
/// `(1 + u).ln()` would lose ~7 digits of the real part at `|u| ~ 1e-9`.
pub(crate) fn ln1p_complex(u: Complex64) -> Complex64 {
    if u.norm() > 1e8 {
        // No cancellation possible; also keeps |u|^2 from overflowing.
        return (Complex64::new(1.0, 0.0) + u).ln();
    }
    let t = 2.0 * u.re + u.re * u.re + u.im * u.im;
    Complex64::new(0.5 * t.ln_1p(), u.im.atan2(1.0 + u.re))
}

/// True when `w` lies on the closed negative real axis, where the
/// principal power is undefined (this includes `w = 0`).
fn on_principal_cut(w: Complex64) -> bool {
    w.im == 0.0 && w.re <= 0.0
}

/// Deformed exponential `[1 + (1-q) z]^{1/(1-q)}`, principal branch.
///
/// `q = 1` is special-cased to `exp(z)` (removing the 0/0 indeterminacy in
/// the exponent), and the general branch is evaluated as
/// `exp(ln1p((1-q) z) / (1-q))` so that small deformations stay accurate
/// and continuity toward `q -> 1+` holds away from the branch cut.
pub fn q_exp(z: Complex64, q: DeformationParameter) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite {
            what: "q_exp argument (magnitude shown)",
            value: z.norm(),
        });
    }
    if q.is_classical() {
        return Ok(z.exp());
    }
    let one_minus_q = 1.0 - q.value();
    let u = z * one_minus_q;
    let w = Complex64::new(1.0, 0.0) + u;
    if on_principal_cut(w) {
        return Err(Error::BranchCut(w));
    }
    Ok((ln1p_complex(u) / one_minus_q).exp())
}

/// Integrand of the forward transform at a single point:
/// `f(x) * [1 + i (1-q') k x f(x)^{q'-1}]^{1/(1-q')}`.
///
/// Returns 0 when `fx = 0`, which both matches compact-support densities
/// and sidesteps `0^{q'-1}` at `q' = 1`.
pub fn qft_integrand(
    x: f64,
    k: Complex64,
    fx: f64,
    qp: DeformationParameter,
) -> Result<Complex64> {
    if fx < 0.0 {
        return Err(Error::InvalidDensity(format!(
            "negative density sample f({x}) = {fx}"
        )));
    }
    if fx == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let arg = Complex64::i() * k * x * fx.powf(qp.value() - 1.0);
    Ok(fx * q_exp(arg, qp)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dp(q: f64) -> DeformationParameter {
        DeformationParameter::new(q).unwrap()
    }

    #[test]
    fn deformation_range_is_enforced() {
        assert!(DeformationParameter::new(1.0).is_ok());
        assert!(DeformationParameter::new(1.9999999).is_ok());
        assert!(DeformationParameter::new(2.0).is_err());
        assert!(DeformationParameter::new(0.999).is_err());
        assert!(DeformationParameter::new(f64::NAN).is_err());
        assert!(DeformationParameter::new(f64::INFINITY).is_err());
    }

    #[test]
    fn heaviside_convention() {
        assert_eq!(heaviside(0.0), 1.0);
        assert_eq!(heaviside(-3.2), 0.0);
        assert_eq!(heaviside(1e-300), 1.0);
        assert_eq!(heaviside(-0.0), 1.0); // -0.0 >= 0.0 in IEEE ordering
    }

    #[test]
    fn q_exp_at_zero_is_one() {
        for q in [1.0, 1.3, 1.5, 1.7, 1.99] {
            let v = q_exp(Complex64::new(0.0, 0.0), dp(q)).unwrap();
            assert_eq!(v, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn q_exp_near_two_matches_geometric_form() {
        // At q = 2 the formula reads [1 - z]^{-1}; q = 2 - 1e-12 must agree.
        let v = q_exp(Complex64::new(0.5, 0.0), dp(2.0 - 1e-12)).unwrap();
        assert_abs_diff_eq!(v.re, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn q_exp_near_one_matches_exponential() {
        let v = q_exp(Complex64::new(1.0, 0.0), dp(1.0 + 1e-8)).unwrap();
        assert_abs_diff_eq!(v.re, std::f64::consts::E, epsilon = 1e-6);
        // Complex argument too.
        let z = Complex64::new(0.3, -0.8);
        let v = q_exp(z, dp(1.0 + 1e-10)).unwrap();
        let e = z.exp();
        assert!((v - e).norm() < 1e-8);
    }

    #[test]
    fn q_exp_continuity_in_q_across_classical_limit() {
        // |q_exp(z, 1+delta) - exp(z)| stays small on the unit disk.
        let delta = 1e-6;
        for &(re, im) in &[(1.0, 0.0), (0.0, 1.0), (-0.7, 0.6), (0.5, -0.5)] {
            let z = Complex64::new(re, im);
            let diff = (q_exp(z, dp(1.0 + delta)).unwrap() - z.exp()).norm();
            assert!(diff <= 1e-4, "z={z}, diff={diff}");
        }
    }

    #[test]
    fn q_exp_conjugate_symmetry() {
        let q = dp(1.5);
        for &(re, im) in &[(0.4, 0.9), (-0.2, 0.3), (1.1, -2.0)] {
            let z = Complex64::new(re, im);
            let lhs = q_exp(z.conj(), q).unwrap();
            let rhs = q_exp(z, q).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn q_exp_reports_branch_cut() {
        // q = 1.5: base is 1 - 0.5 z; z = 4 puts it at -1 on the cut.
        let err = q_exp(Complex64::new(4.0, 0.0), dp(1.5)).unwrap_err();
        assert!(matches!(err, Error::BranchCut(_)));
        // z = 2 puts the base exactly at 0, also undefined (negative exponent).
        let err = q_exp(Complex64::new(2.0, 0.0), dp(1.5)).unwrap_err();
        assert!(matches!(err, Error::BranchCut(_)));
    }

    #[test]
    fn integrand_zero_density_short_circuits() {
        let v = qft_integrand(3.0, Complex64::new(5.0, 2.0), 0.0, dp(1.5)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
        // Even at q' = 1 where fx^{q'-1} would be 0^0.
        let v = qft_integrand(3.0, Complex64::new(5.0, 0.0), 0.0, dp(1.0)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn integrand_at_k_zero_returns_density() {
        let v = qft_integrand(1.5, Complex64::new(0.0, 0.0), 2.0, dp(1.5)).unwrap();
        assert_abs_diff_eq!(v.re, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn integrand_modulus_bounded_by_density_for_real_k() {
        // For real k and x >= 0 the bracket is 1 + i t with |.| >= 1 and the
        // exponent 1/(1-q') is negative real, so the modulus cannot exceed fx.
        let fx = 8.0 / 9.0;
        let v = qft_integrand(1.5, Complex64::new(1.0, 0.0), fx, dp(1.5)).unwrap();
        assert!(v.norm() <= fx + 1e-15, "modulus {} > fx {}", v.norm(), fx);

        // Exact oracle: fx * (1 + i (1-q') t)^{1/(1-q')} with t = k x fx^{0.5}
        // and q' = 1.5, i.e. fx * (1 - 0.5 i t)^{-2}.
        let t = 1.5 * fx.sqrt();
        let oracle = fx * Complex64::new(1.0, -0.5 * t).powf(-2.0);
        assert!((v - oracle).norm() < 1e-15);
    }

    #[test]
    fn integrand_at_classical_q_is_plain_fourier() {
        let (x, fx) = (0.7, 1.3);
        let k = Complex64::new(2.0, 0.0);
        let v = qft_integrand(x, k, fx, dp(1.0)).unwrap();
        let oracle = fx * (Complex64::i() * k * x).exp();
        assert!((v - oracle).norm() < 1e-15);
    }

    #[test]
    fn ln1p_complex_small_argument_accuracy() {
        let u = Complex64::new(1e-9, -2e-9);
        let got = ln1p_complex(u);
        // ln(1+u) = u - u^2/2 + O(u^3); the u^3 term is ~1e-27, so the
        // two-term expansion is the correct value to double precision.
        // A naive ln(1+u) would lose ~7 digits here.
        let want = u - u * u * 0.5;
        assert!((got - want).norm() < 1e-24);
        // Moderate argument agrees with the direct logarithm.
        let u = Complex64::new(0.25, 0.5);
        let direct = (Complex64::new(1.0, 0.0) + u).ln();
        assert!((ln1p_complex(u) - direct).norm() < 1e-15);
    }
}
