//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A feature name is unknown, duplicated, or collides with the schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A scoring function produced a NaN or infinite score.
    #[error("non-finite score on lot {lot}")]
    NonFiniteScore { lot: usize },

    /// The training loss left the finite range.
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    TrainingDiverged { epoch: usize },

    /// A derivative-free objective returned a NaN or infinite value.
    #[error("objective returned a non-finite value at {point:?}")]
    NonFiniteObjective { point: Vec<f64> },

    /// The brute-force grid is too large to enumerate under the configured cap.
    #[error(
        "brute-force grid has {candidates} candidates ({pair_evals} candidate-lot \
         evaluations, cap {cap}); raise the cap or lower n"
    )]
    ResourceLimit {
        candidates: u128,
        pair_evals: u128,
        cap: u128,
    },

    /// A cross-validation fold failed; carries the failing fold index.
    #[error("fold {fold} failed: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }
}
