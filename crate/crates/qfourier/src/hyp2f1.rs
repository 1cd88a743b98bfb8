//! Gauss hypergeometric function 2F1(a, b; c; z) for complex argument.
//!
//! Evaluation is region-switched:
//!
//! - power series for `|z| <= 0.5`;
//! - the 1/z connection formula for `|z| >= 2` (needs `a - b` away from
//!   integers);
//! - the Pfaff transformation `z -> z/(z-1)` for `Re(z) < 0.5`, where the
//!   mapped argument always has modulus below 1;
//! - the 1-z connection formula near `z = 1` (needs `c - a - b` away from
//!   integers);
//! - a last-resort pass through whichever connection formula still has a
//!   convergent argument.
//!
//! Degenerate integer parameter differences make the connection
//! coefficients singular; those cases fail loudly instead of silently
//! losing accuracy, and the two lens-shaped neighborhoods of
//! `z = exp(+-i pi/3)` where every series has ratio 1 surface as a
//! term-cap error. Series stop once the last term falls below 1e-16
//! relative to the partial sum (twice in a row), with a hard cap of 1e5
//! terms.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative size at which a series term counts as converged.
const TERM_TOL: f64 = 1e-16;
/// Hard cap on series length.
const TERM_CAP: usize = 100_000;
/// Distance to an integer below which a connection formula is degenerate.
const DEGENERATE_TOL: f64 = 1e-8;
/// Tolerance for recognizing nonpositive-integer parameters (polynomial case).
const INT_SNAP_TOL: f64 = 1e-12;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The three parameter slots of 2F1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Params {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl Hyp2F1Params {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        let p = Self { a, b, c };
        p.validate()?;
        Ok(p)
    }

    /// Real parameters, the shape produced by the closed-form transform.
    pub fn real(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(
            Complex64::new(a, 0.0),
            Complex64::new(b, 0.0),
            Complex64::new(c, 0.0),
        )
    }

    /// Rejects non-finite slots and a lower parameter `c` at (or within
    /// 1e-12 of) a nonpositive integer, where every series term eventually
    /// divides by zero.
    pub fn validate(&self) -> Result<()> {
        for (slot, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite {
                    what: match slot {
                        "a" => "hypergeometric parameter a (magnitude shown)",
                        "b" => "hypergeometric parameter b (magnitude shown)",
                        _ => "hypergeometric parameter c (magnitude shown)",
                    },
                    value: v.norm(),
                });
            }
        }
        if nonpositive_integer(self.c, INT_SNAP_TOL).is_some() {
            return Err(Error::DegenerateHyp2F1 {
                reason: "lower parameter c is a nonpositive integer",
                a: self.a,
                b: self.b,
                c: self.c,
            });
        }
        Ok(())
    }
}

/// `Some(n)` when `x` is within `tol` of `-n` for a nonnegative integer `n`.
fn nonpositive_integer(x: Complex64, tol: f64) -> Option<usize> {
    if x.im.abs() > tol {
        return None;
    }
    let r = x.re.round();
    if r <= 0.5 && (x.re - r).abs() <= tol {
        Some((-r) as usize)
    } else {
        None
    }
}

/// True when `x` is within `tol` of any integer (connection-formula
/// degeneracy test).
fn near_integer(x: Complex64, tol: f64) -> bool {
    x.im.abs() <= tol && (x.re - x.re.round()).abs() <= tol
}

/// Log-gamma for complex argument: Lanczos (g = 7, 9 terms) with the
/// reflection formula on `Re(z) < 0.5`. Individual values may differ from
/// the principal branch by multiples of 2 pi i; the connection
/// coefficients only ever exponentiate sums of four of these, where such
/// offsets cancel.
pub(crate) fn ln_gamma(z: Complex64) -> Complex64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    let pi = std::f64::consts::PI;
    if z.re < 0.5 {
        // ln Gamma(z) = ln(pi / sin(pi z)) - ln Gamma(1 - z)
        let s = (z * pi).sin();
        Complex64::new(pi.ln(), 0.0) - s.ln() - ln_gamma(ONE - z)
    } else {
        let zm1 = z - ONE;
        let mut x = Complex64::new(COEF[0], 0.0);
        for (i, &ci) in COEF.iter().enumerate().skip(1) {
            x += ci / (zm1 + i as f64);
        }
        let t = zm1 + 7.5;
        0.5 * (2.0 * pi).ln() + (zm1 + 0.5) * t.ln() - t + x.ln()
    }
}

/// `exp` of a sum of log-gammas: `Gamma(n0) Gamma(n1) / (Gamma(d0) Gamma(d1))`.
fn gamma_ratio(n0: Complex64, n1: Complex64, d0: Complex64, d1: Complex64) -> Complex64 {
    (ln_gamma(n0) + ln_gamma(n1) - ln_gamma(d0) - ln_gamma(d1)).exp()
}

/// The defining power series, valid for `|z| < 1`; terminates exactly for
/// polynomial cases. Demands two consecutive terms below the relative
/// tolerance before stopping.
fn series(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    let mut term = ONE;
    let mut sum = ONE;
    let mut quiet = 0u8;
    for n in 0..TERM_CAP {
        let nf = n as f64;
        term = term * (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == Complex64::new(0.0, 0.0) {
            return Ok(sum); // terminated polynomial
        }
        if !term.re.is_finite() || !term.im.is_finite() {
            // Divergence already overflowed; no point running to the cap.
            return Err(Error::SeriesCap { cap: TERM_CAP, z });
        }
        if term.norm() <= TERM_TOL * sum.norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::SeriesCap { cap: TERM_CAP, z })
}

/// Exactly `n_terms` leading terms of the series (polynomial evaluation).
fn series_terminating(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    n_terms: usize,
) -> Complex64 {
    let mut term = ONE;
    let mut sum = ONE;
    for n in 0..n_terms {
        let nf = n as f64;
        term = term * (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
    }
    sum
}

/// Pfaff transformation `F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1))`,
/// applied on whichever upper slot leaves the smaller new parameter (for
/// the closed-form transform's `c = b + 1` shape this collapses the `b`
/// slot to 1, taming otherwise huge parameters).
fn pfaff(p: &Hyp2F1Params, z: Complex64) -> Result<Complex64> {
    let w = z / (z - ONE);
    let one_minus_z = ONE - z;
    if (p.c - p.b).norm() <= (p.c - p.a).norm() {
        Ok(one_minus_z.powc(-p.a) * series(p.a, p.c - p.b, p.c, w)?)
    } else {
        Ok(one_minus_z.powc(-p.b) * series(p.c - p.a, p.b, p.c, w)?)
    }
}

/// Connection formula in `1 - z` (DLMF 15.8.4); degenerate when
/// `c - a - b` is near an integer.
fn connect_one_minus_z(p: &Hyp2F1Params, z: Complex64) -> Result<Complex64> {
    let (a, b, c) = (p.a, p.b, p.c);
    let cab = c - a - b;
    if near_integer(cab, DEGENERATE_TOL) {
        return Err(Error::DegenerateHyp2F1 {
            reason: "c - a - b within 1e-8 of an integer (1 - z connection)",
            a,
            b,
            c,
        });
    }
    let u = ONE - z;
    let first = gamma_ratio(c, cab, c - a, c - b) * series(a, b, a + b - c + ONE, u)?;
    let second = gamma_ratio(c, -cab, a, b) * u.powc(cab) * series(c - a, c - b, cab + ONE, u)?;
    Ok(first + second)
}

/// Connection formula in `1 / z` (DLMF 15.8.2); degenerate when `a - b`
/// is near an integer.
fn connect_one_over_z(p: &Hyp2F1Params, z: Complex64) -> Result<Complex64> {
    let (a, b, c) = (p.a, p.b, p.c);
    let ab = a - b;
    if near_integer(ab, DEGENERATE_TOL) {
        return Err(Error::DegenerateHyp2F1 {
            reason: "a - b within 1e-8 of an integer (1 / z connection)",
            a,
            b,
            c,
        });
    }
    let zi = ONE / z;
    let first =
        gamma_ratio(c, b - a, b, c - a) * (-z).powc(-a) * series(a, a - c + ONE, ab + ONE, zi)?;
    let second =
        gamma_ratio(c, ab, a, c - b) * (-z).powc(-b) * series(b, b - c + ONE, -ab + ONE, zi)?;
    Ok(first + second)
}

/// Gauss hypergeometric function at complex argument, principal branch,
/// refusing the cut `[1, inf)`.
pub fn gauss_2f1(p: &Hyp2F1Params, z: Complex64) -> Result<Complex64> {
    p.validate()?;
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite {
            what: "hypergeometric argument (magnitude shown)",
            value: z.norm(),
        });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(ONE);
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::Hyp2F1Cut(z));
    }
    // Binomial reductions: an upper slot equal to c cancels against it.
    if p.b == p.c {
        return Ok((ONE - z).powc(-p.a));
    }
    if p.a == p.c {
        return Ok((ONE - z).powc(-p.b));
    }
    // Polynomial cases converge everywhere.
    if let Some(n) = nonpositive_integer(p.a, INT_SNAP_TOL) {
        return Ok(series_terminating(p.a, p.b, p.c, z, n));
    }
    if let Some(n) = nonpositive_integer(p.b, INT_SNAP_TOL) {
        return Ok(series_terminating(p.a, p.b, p.c, z, n));
    }

    if z.norm() <= 0.5 {
        return series(p.a, p.b, p.c, z);
    }
    if z.norm() >= 2.0 && !near_integer(p.a - p.b, DEGENERATE_TOL) {
        return connect_one_over_z(p, z);
    }
    if z.re < 0.5 {
        // Here |z/(z-1)| < 1 is automatic.
        return pfaff(p, z);
    }
    if (ONE - z).norm() <= 0.75 {
        return connect_one_minus_z(p, z);
    }
    // Last resorts for the remaining crescent around |z| ~ |1 - z| ~ 1:
    // whichever connection formula still has a convergent argument, with
    // its own degeneracy check deciding between a value and a loud error.
    if (ONE - z).norm() < 1.0 && !near_integer(p.c - p.a - p.b, DEGENERATE_TOL) {
        return connect_one_minus_z(p, z);
    }
    if z.norm() > 1.0 {
        return connect_one_over_z(p, z);
    }
    connect_one_minus_z(p, z)
}
