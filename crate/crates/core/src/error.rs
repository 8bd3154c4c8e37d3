use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is outside the operation's contract.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method failed to converge.
    #[error("numerical failure in {method}: {detail}")]
    Numerical { method: &'static str, detail: String },

    /// An iterative solver used up its sweep budget; the partial report is
    /// attached.
    #[error("solver did not converge: {}", .0.summary_line())]
    NotConverged(Box<crate::dirichlet::SolveReport>),

    /// A solver invariant was breached.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
