use core::fmt;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Annulus parameters violate `0 < r1 < r2`, `0 <= t < r2 - r1`.
    InvalidAnnulus { r1: f64, r2: f64, t: f64 },
    /// The bipolar frame does not exist at `t = 0`; use the concentric
    /// closed form instead.
    DegenerateFrame,
    /// The eigenpair iteration exhausted its budget.
    ConvergenceFailure { n: usize, residual: f64 },
    /// Truncation doubling hit `n_max` before meeting the stopping criterion.
    NoConvergence { n_max: usize, last_delta: f64 },
    /// Eigenvector does not belong to a section built on the given frame.
    FrameMismatch,
    /// Periodic quadrature failed to stabilize within the node budget.
    QuadratureStall,
    /// The series trace is numerically null.
    ZeroFunction,
    /// Evaluation point lies outside the closed annulus `[xi2, xi1]`.
    OutOfDomain { xi: f64 },
    /// Operation requires a normalized eigenfunction series.
    NotNormalized,
    /// A continued-fraction denominator collapsed; the trial eigenvalue is
    /// far from the spectrum.
    DivisionNearZero { index: usize },
    /// The root bracket does not straddle a sign change.
    NoRootInBracket { lo: f64, hi: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidAnnulus { r1, r2, t } => write!(
                f,
                "invalid annulus: r1={r1}, r2={r2}, t={t} (need 0 < r1 < r2 and 0 <= t < r2 - r1)"
            ),
            Error::DegenerateFrame => {
                write!(f, "bipolar frame degenerates at t = 0; use the concentric closed form")
            }
            Error::ConvergenceFailure { n, residual } => {
                write!(f, "eigenpair iteration failed at n={n} (residual {residual:e})")
            }
            Error::NoConvergence { n_max, last_delta } => write!(
                f,
                "truncation doubling reached n_max={n_max} without converging (last delta {last_delta:e})"
            ),
            Error::FrameMismatch => write!(f, "eigenvector was built on a different bipolar frame"),
            Error::QuadratureStall => write!(f, "periodic quadrature did not stabilize within 2^20 nodes"),
            Error::ZeroFunction => write!(f, "eigenfunction trace is numerically null"),
            Error::OutOfDomain { xi } => write!(f, "coordinate xi={xi} outside the annulus levels"),
            Error::NotNormalized => write!(f, "operation requires a normalized eigenfunction series"),
            Error::DivisionNearZero { index } => {
                write!(f, "continued-fraction denominator vanished at index {index}")
            }
            Error::NoRootInBracket { lo, hi } => {
                write!(f, "no sign change over the bracket ({lo}, {hi})")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
