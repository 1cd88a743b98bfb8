//! Equivalence classes of power-law densities sharing one scale
//! invariant, and the two verifications that make the injectivity story
//! concrete: the diagonal transform collapses within a class (distinct
//! densities, identical transforms), while the closed diagonal form
//! separates classes with distinct scale invariants.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::densities::{hilhorst_lambda, solve_b_for_lambda, DensitySpec, HilhorstFamily};
use crate::error::{Error, Result};
use crate::qkernel::DeformationParameter;
use crate::quad::QuadratureConfig;
use crate::transform::{ft_diagonal, hilhorst_uts_closed};

/// Relative tolerance within which every member's scale invariant must
/// match the class's.
pub const MEMBER_LAMBDA_TOL: f64 = 1e-12;

/// Minimum relative gap between two class invariants for a separation
/// check to be meaningful.
pub const SEPARATION_MIN_GAP: f64 = 1e-6;

/// A finite sample of one equivalence class: power-law members that all
/// share the same deformation index and scale invariant.
#[derive(Debug, Clone)]
pub struct EquivalenceClassProbe {
    pub q: DeformationParameter,
    pub lambda: f64,
    pub members: Vec<HilhorstFamily>,
}

impl EquivalenceClassProbe {
    /// Builds a probe from explicit members, checking they genuinely
    /// belong to the `(q, lambda)` class.
    pub fn new(
        q: DeformationParameter,
        lambda: f64,
        members: Vec<HilhorstFamily>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidProbe(
                "at least one member required".to_string(),
            ));
        }
        if members.len() < 2 {
            return Err(Error::InvalidProbe(
                "a class probe needs at least two members to witness collapse".to_string(),
            ));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidProbe(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        for m in &members {
            if m.q.value() != q.value() {
                return Err(Error::InvalidProbe(format!(
                    "member ({}, {}) carries index {} instead of {}",
                    m.a,
                    m.b,
                    m.q.value(),
                    q.value()
                )));
            }
            let lam = hilhorst_lambda(m.a, m.b, q)?;
            if (lam - lambda).abs() > MEMBER_LAMBDA_TOL * lambda {
                return Err(Error::InvalidProbe(format!(
                    "member ({}, {}) has scale invariant {lam}, not {lambda}",
                    m.a, m.b
                )));
            }
        }
        Ok(Self { q, lambda, members })
    }
}

/// Builds a class probe by solving for each member's upper endpoint from
/// its lower endpoint and the shared invariant.
pub fn build_class(
    q: DeformationParameter,
    lambda: f64,
    a_values: &[f64],
) -> Result<EquivalenceClassProbe> {
    if a_values.is_empty() {
        return Err(Error::InvalidProbe(
            "at least one member required".to_string(),
        ));
    }
    let members = a_values
        .iter()
        .map(|&a| {
            let b = solve_b_for_lambda(a, lambda, q)?;
            HilhorstFamily::new(a, b, q)
        })
        .collect::<Result<Vec<_>>>()?;
    EquivalenceClassProbe::new(q, lambda, members)
}

/// Per-k row of a collapse check.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseRow {
    pub k: f64,
    /// Diagonal-transform value of each member, member order.
    pub values: Vec<Complex64>,
    /// Quadrature error estimate for each member.
    pub err_estimates: Vec<f64>,
    /// Largest |difference| between any two members at this k.
    pub max_pairwise: f64,
    /// Ten times the summed error estimates: the budget the pairwise
    /// deviation must stay inside.
    pub budget: f64,
    /// Closed diagonal form at this k.
    pub closed_form: Complex64,
    /// Largest member deviation from the closed form.
    pub max_vs_closed: f64,
    /// Ten times the largest single-member error estimate: the budget for
    /// the closed-form comparison.
    pub closed_budget: f64,
}

/// Outcome of a within-class collapse check.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseReport {
    pub q: f64,
    pub lambda: f64,
    /// `(a, b)` of each member.
    pub members: Vec<(f64, f64)>,
    pub rows: Vec<CollapseRow>,
    pub max_pairwise_deviation: f64,
    pub max_closed_form_deviation: f64,
    /// Every row's pairwise deviation stayed within its error budget.
    pub collapse_ok: bool,
    /// Every member matched the closed form within budget at every k.
    pub closed_form_ok: bool,
}

/// Evaluates every member's diagonal transform on the real k-grid and
/// checks that the members are numerically indistinguishable and agree
/// with the closed diagonal form. Rows are assembled in grid order,
/// members in member order, regardless of scheduling.
pub fn verify_collapse(
    p: &EquivalenceClassProbe,
    k_grid: &[f64],
    qcfg: &QuadratureConfig,
) -> Result<CollapseReport> {
    if k_grid.is_empty() {
        return Err(Error::InvalidProbe("empty k-grid".to_string()));
    }
    if let Some(k) = k_grid.iter().find(|k| !k.is_finite()) {
        return Err(Error::InvalidProbe(format!("non-finite grid point {k}")));
    }
    let densities: Vec<DensitySpec> = p
        .members
        .iter()
        .map(|m| DensitySpec::hilhorst(m.a, m.b, p.q))
        .collect::<Result<_>>()?;
    let rows: Vec<CollapseRow> = k_grid
        .par_iter()
        .map(|&k| -> Result<CollapseRow> {
            let kc = Complex64::new(k, 0.0);
            let mut values = Vec::with_capacity(densities.len());
            let mut errs = Vec::with_capacity(densities.len());
            for d in &densities {
                let s = ft_diagonal(d, kc, qcfg)?;
                values.push(s.value);
                errs.push(s.abs_err_estimate);
            }
            let mut max_pairwise = 0.0_f64;
            for i in 0..values.len() {
                for j in i + 1..values.len() {
                    max_pairwise = max_pairwise.max((values[i] - values[j]).norm());
                }
            }
            let closed = hilhorst_uts_closed(p.lambda, p.q.value(), kc)?;
            let max_vs_closed = values
                .iter()
                .map(|v| (v - closed).norm())
                .fold(0.0_f64, f64::max);
            Ok(CollapseRow {
                k,
                budget: 10.0 * errs.iter().sum::<f64>(),
                closed_budget: 10.0 * errs.iter().copied().fold(0.0_f64, f64::max),
                values,
                err_estimates: errs,
                max_pairwise,
                closed_form: closed,
                max_vs_closed,
            })
        })
        .collect::<Result<_>>()?;
    let collapse_ok = rows.iter().all(|r| r.max_pairwise <= r.budget);
    let closed_form_ok = rows.iter().all(|r| r.max_vs_closed <= r.closed_budget);
    Ok(CollapseReport {
        q: p.q.value(),
        lambda: p.lambda,
        members: p.members.iter().map(|m| (m.a, m.b)).collect(),
        max_pairwise_deviation: rows.iter().map(|r| r.max_pairwise).fold(0.0, f64::max),
        max_closed_form_deviation: rows.iter().map(|r| r.max_vs_closed).fold(0.0, f64::max),
        rows,
        collapse_ok,
        closed_form_ok,
    })
}

/// Per-k row of a separation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationRow {
    pub k: f64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub deviation: f64,
}

/// Outcome of a between-class separation check.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub q: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub rows: Vec<SeparationRow>,
    pub min_deviation: f64,
    pub min_witness_k: f64,
    pub max_deviation: f64,
    pub max_witness_k: f64,
    /// Lower bound the maximum deviation must exceed, derived from the
    /// invariant gap at the smallest nonzero grid |k| (first order in k).
    pub floor: f64,
    /// The grid contains no nonzero k, so separation cannot show up.
    pub grid_insufficient: bool,
    pub separation_ok: bool,
}

/// Compares the closed diagonal forms of two classes on a real k-grid.
/// Both probes must share a deformation index and have invariants more
/// than `SEPARATION_MIN_GAP` apart (relative).
pub fn verify_separation(
    p1: &EquivalenceClassProbe,
    p2: &EquivalenceClassProbe,
    k_grid: &[f64],
) -> Result<SeparationReport> {
    if p1.q.value() != p2.q.value() {
        return Err(Error::InvalidProbe(format!(
            "classes at different indices ({} vs {}) are not comparable under one diagonal transform",
            p1.q.value(),
            p2.q.value()
        )));
    }
    let gap = (p1.lambda - p2.lambda).abs() / p1.lambda;
    if gap <= SEPARATION_MIN_GAP {
        return Err(Error::InvalidProbe(format!(
            "scale invariants {} and {} coincide within the minimum gap; the probes sample one class",
            p1.lambda, p2.lambda
        )));
    }
    if k_grid.is_empty() {
        return Err(Error::InvalidProbe("empty k-grid".to_string()));
    }
    if let Some(k) = k_grid.iter().find(|k| !k.is_finite()) {
        return Err(Error::InvalidProbe(format!("non-finite grid point {k}")));
    }
    let q = p1.q.value();
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let kc = Complex64::new(k, 0.0);
        let f1 = hilhorst_uts_closed(p1.lambda, q, kc)?;
        let f2 = hilhorst_uts_closed(p2.lambda, q, kc)?;
        rows.push(SeparationRow {
            k,
            f1,
            f2,
            deviation: (f1 - f2).norm(),
        });
    }
    let (min_row, max_row) = rows.iter().skip(1).fold((&rows[0], &rows[0]), |(lo, hi), r| {
        (
            if r.deviation < lo.deviation { r } else { lo },
            if r.deviation > hi.deviation { r } else { hi },
        )
    });
    let (min_deviation, min_witness_k) = (min_row.deviation, min_row.k);
    let (max_deviation, max_witness_k) = (max_row.deviation, max_row.k);
    let smallest_nonzero = k_grid
        .iter()
        .map(|k| k.abs())
        .filter(|k| *k > 0.0)
        .fold(f64::INFINITY, f64::min);
    let grid_insufficient = !smallest_nonzero.is_finite();
    let floor = if grid_insufficient {
        0.0
    } else {
        // |F1 - F2| ~ |k| |lambda1 - lambda2| to first order; keep k
        // inside the linear regime and take half as safety margin.
        let k_eff = smallest_nonzero.min(1.0 / (q * p1.lambda.max(p2.lambda)));
        0.5 * k_eff * (p1.lambda - p2.lambda).abs()
    };
    Ok(SeparationReport {
        q,
        lambda1: p1.lambda,
        lambda2: p2.lambda,
        rows,
        min_deviation,
        min_witness_k,
        max_deviation,
        max_witness_k,
        floor,
        grid_insufficient,
        separation_ok: !grid_insufficient && max_deviation >= floor,
    })
}
