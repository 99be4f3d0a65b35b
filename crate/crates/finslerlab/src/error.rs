use thiserror::Error;

/// Errors surfaced by the curvature pipeline.
///
/// Validation findings (a metric that fails positivity, a bracket that is not
/// antisymmetric) are *not* errors; they are reported as data by
/// [`crate::algebra::HomogeneousSpec::validate`]. This enum covers conditions
/// under which a requested quantity cannot be evaluated at all.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("tangent vector has zero alpha-norm")]
    ZeroVector,

    /// Kropina-type models are undefined at s = 0.
    #[error("phi(s) = s^(-m) is undefined at s = 0")]
    SingularAtZero,

    /// A fractional power of a negative argument has no real value.
    #[error("phi(s) = s^(-m) with non-integer m = {m} requires s > 0, got s = {s}")]
    NonRealPower { m: f64, s: f64 },

    /// The denominator phi - s phi' of Q vanished; the induced metric data is
    /// degenerate at this slope.
    #[error("phi - s*phi' vanishes at s = {s}; scalar bundle is degenerate there")]
    DegeneratePhi { s: f64 },

    /// The denominator (1-m) s^2 + b^2 m of the omega factor vanished.
    #[error("omega denominator (1-m)s^2 + b^2 m vanishes at s = {s}")]
    DegenerateOmega { s: f64 },

    /// A direction with beta = 0 was requested for a model singular at s = 0.
    #[error("direction lies on the singular cone beta = 0 of a kropina-type model")]
    SingularDirection,

    /// The difference stencil could not be kept inside the regular domain.
    #[error("difference stencil leaves the regular domain even after {halvings} step halvings")]
    StencilLeavesDomain { halvings: u32 },

    #[error("quadrature did not converge; the integral appears divergent")]
    QuadratureDivergence,

    #[error("direction sampler found no regular directions after {attempts} attempts")]
    NoRegularDirections { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
