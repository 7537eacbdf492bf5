use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies on or outside the domain boundary ({0})")]
    Domain(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("unsupported dimension {0}; quadrature is limited to d <= 2")]
    UnsupportedDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported loss: {0}")]
    UnsupportedLoss(String),

    #[error("black-box loss carries no certified constants")]
    Uncertified,

    #[error("out-of-order ledger record: expected round {expected}, got {got}")]
    RoundMismatch { expected: usize, got: usize },

    #[error("game is not zero-sum")]
    NotZeroSum,

    #[error("incomplete trace: {0}")]
    IncompleteTrace(String),

    #[error("trace is inconsistent with the learning rate (p_2 deviates by {deviation:e})")]
    TraceMismatch { deviation: f64 },

    #[error("round {t} lies in the transition window ({lo}, {hi}) with no closed form")]
    TransitionWindow { t: usize, lo: f64, hi: f64 },

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("round {round}: {source}")]
    AtRound { round: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn at_round(self, round: usize) -> Error {
        match self {
            e @ Error::AtRound { .. } => e,
            e => Error::AtRound {
                round,
                source: Box::new(e),
            },
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
