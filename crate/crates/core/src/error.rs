use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by all engines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// The requested exact state space or statevector does not fit the engine's cap.
    ResourceCap {
        what: &'static str,
        requested: u64,
        limit: u64,
    },
    /// An input collection was empty or too small.
    EmptyInput(&'static str),
    /// Quadrature or adaptive stepping missed its error target.
    NonConvergence {
        what: &'static str,
        achieved: f64,
        target: f64,
    },
    /// The evaluation point lies on (or inside the guard band of) a branch cut.
    BranchCut { re: f64, im: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::ResourceCap {
                what,
                requested,
                limit,
            } => write!(f, "{what}: requested {requested} exceeds the cap of {limit}"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::NonConvergence {
                what,
                achieved,
                target,
            } => write!(
                f,
                "{what} did not converge (error estimate {achieved:e}, target {target:e})"
            ),
            Error::BranchCut { re, im } => {
                write!(f, "argument {re}{im:+}i lies on the branch cut [1, inf)")
            }
        }
    }
}

impl core::error::Error for Error {}
