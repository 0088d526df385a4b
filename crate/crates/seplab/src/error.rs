//! Library error type. Input problems and internal failures are separate
//! variants so the CLI can map them to distinct exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("graph is disconnected; this operation needs a connected graph")]
    Disconnected,

    #[error("graph has {n} vertices, exact solver capped at {max_n}")]
    TooLarge { n: usize, max_n: usize },

    #[error("embedding has no spread (all coordinates equal)")]
    NoSpread,

    #[error("no threshold admits a valid partition (every cut empties a side)")]
    NoValidCut,

    #[error(
        "congestion solver did not converge within {rounds} rounds \
         (best bracket [{lb}, {ub}])"
    )]
    NonConvergence { rounds: usize, lb: f64, ub: f64 },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// True for errors caused by the caller's data rather than by a solver
    /// giving up.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NonConvergence { .. })
    }
}
