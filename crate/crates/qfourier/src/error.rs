//! Error type shared by every module of the crate.

use num_complex::Complex64;

/// Everything that can go wrong across kernel evaluation, quadrature,
/// special functions, density construction, and the transform drivers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A deformation index outside the admissible band `[1, 2)`.
    #[error("deformation parameter {0} is outside the admissible range [1, 2)")]
    DeformationRange(f64),

    /// A non-finite value where a finite one is required.
    #[error("non-finite value for {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },

    /// The base of a principal-branch power landed on the closed negative
    /// real axis, where the power is not defined without a side convention.
    #[error("principal-branch power undefined: base {0} lies on the closed negative real axis")]
    BranchCut(Complex64),

    /// An integration interval with `a >= b`.
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    /// Quadrature configuration that violates its own invariants.
    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadratureConfig(String),

    /// A semi-infinite tail that never fell below the cutoff.
    #[error("semi-infinite tail failed to decay after {panels} doubling panels (last contribution {last:.3e})")]
    TailDidNotDecay { panels: u32, last: f64 },

    /// A quadrature that exhausted its budget, surfaced where a caller
    /// needs a trustworthy scalar rather than a flagged estimate.
    #[error("quadrature did not converge: error estimate {estimate:.3e} after {subdivisions} subdivisions")]
    QuadratureDidNotConverge { estimate: f64, subdivisions: u32 },

    /// Hypergeometric parameters for which the implemented evaluation
    /// strategy degenerates (limit formulas are out of scope).
    #[error("degenerate hypergeometric parameters: {reason} (a={a}, b={b}, c={c})")]
    DegenerateHyp2F1 {
        reason: &'static str,
        a: Complex64,
        b: Complex64,
        c: Complex64,
    },

    /// A hypergeometric series that did not meet the term tolerance
    /// within the hard term cap.
    #[error("hypergeometric series did not converge within {cap} terms (argument {z})")]
    SeriesCap { cap: usize, z: Complex64 },

    /// Hypergeometric argument on the branch cut `[1, inf)`.
    #[error("hypergeometric argument {0} lies on the branch cut [1, inf)")]
    Hyp2F1Cut(Complex64),

    /// Density parameters that violate the family's invariants.
    #[error("invalid density: {0}")]
    InvalidDensity(String),

    /// No support endpoint `b` can reach the requested lambda for this `a`.
    #[error("lambda {requested} is not achievable for a={a}: the infimum over b is {infimum}")]
    UnachievableLambda {
        a: f64,
        requested: f64,
        infimum: f64,
    },

    /// Closed-form evaluation at the regime boundary, where both
    /// hypergeometric representations degenerate.
    #[error("closed form undefined at the regime boundary q' = {boundary} (got q' = {qp})")]
    RegimeBoundary { qp: f64, boundary: f64 },

    /// Closed-form evaluation requested off its half-plane of validity.
    #[error("closed form requires Im(k) > 0, got k = {0}")]
    LowerHalfPlane(Complex64),

    /// A diagonal transform of a density variant that does not carry its
    /// own deformation index.
    #[error("density variant carries no deformation index; supply one explicitly")]
    MissingDeformation,

    /// Inverse-transform configuration that violates its own invariants.
    #[error("invalid inverse configuration: {0}")]
    InvalidInverseConfig(String),

    /// An equivalence-class probe that cannot be built or compared.
    #[error("invalid equivalence-class probe: {0}")]
    InvalidProbe(String),

    /// Malformed input file (tabulated density).
    #[error("malformed table {path}: {reason}")]
    MalformedTable { path: String, reason: String },

    /// A k-grid specification that violates its invariants.
    #[error("invalid k-grid: {0}")]
    InvalidGrid(String),

    /// Request for a self-test check that does not exist.
    #[error("unknown self-test check '{0}'")]
    UnknownCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// `true` for errors caused by invalid configuration or inputs, as
    /// opposed to numerical failures encountered during a valid run.
    /// The CLI maps the former to exit code 2 and the latter to exit 3.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::DeformationRange(_)
                | Error::NonFinite { .. }
                | Error::InvalidInterval { .. }
                | Error::InvalidQuadratureConfig(_)
                | Error::InvalidDensity(_)
                | Error::InvalidInverseConfig(_)
                | Error::InvalidProbe(_)
                | Error::MalformedTable { .. }
                | Error::MissingDeformation
                | Error::LowerHalfPlane(_)
                | Error::InvalidGrid(_)
                | Error::UnknownCheck(_)
        )
    }
}
