use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a structural precondition (zero sizes, bad shapes).
    InvalidArgument(&'static str),
    /// A real-valued argument fell outside the function's domain.
    Domain { what: &'static str, value: f64 },
    /// Edge insertion would break simplicity of the graph.
    InvalidEdge {
        u: usize,
        v: usize,
        reason: &'static str,
    },
    /// Matrix or feature shapes disagree.
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// Fewer positively weighted candidates than requested draws.
    NotEnoughCandidates { requested: usize, available: usize },
    /// The degree sum used to turn degrees into probabilities was zero.
    ZeroDegreeSum,
    /// The joint covariance of neighbours and the new feature is not
    /// positive definite: `det` is `1 - ρᵀρ` in normal space.
    CovarianceNotPositiveDefinite { det: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::InvalidEdge { u, v, reason } => write!(f, "invalid edge ({u}, {v}): {reason}"),
            Error::ShapeMismatch { expected, found } => write!(
                f,
                "shape mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::NotEnoughCandidates {
                requested,
                available,
            } => write!(
                f,
                "cannot draw {requested} distinct neighbours from {available} candidates"
            ),
            Error::ZeroDegreeSum => f.write_str("degree sum is zero"),
            Error::CovarianceNotPositiveDefinite { det } => {
                write!(
                    f,
                    "covariance not positive definite (1 - rho'rho = {det:e})"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
