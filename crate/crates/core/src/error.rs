use thiserror::Error;

use crate::coalition::CoalitionMask;

pub type Result<T, E = TcError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TcError {
    #[error("lambert W0 is undefined for x = {0} (domain is x >= -1/e)")]
    LambertDomain(f64),

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid situation: {0}")]
    InvalidSituation(String),

    #[error("coalition {0} is empty")]
    EmptyCoalition(CoalitionMask),

    #[error("{players} players exceeds the enumeration bound of {max}")]
    TooManyPlayers { players: usize, max: usize },

    #[error("delta must lie in (0, 1), got {0}")]
    DeltaOutOfRange(f64),

    #[error("game is already delta-scaled")]
    AlreadyScaled,

    #[error("the payback threshold is undefined when v(N) = {0} <= 0")]
    UndefinedThreshold(f64),

    #[error("I-PROP is undefined: sum of singleton values is {0:e}")]
    DegenerateDenominator(f64),

    #[error("MSE payoff of player {player} is zero")]
    ZeroMsePayoff { player: usize },

    #[error("rule {0} needs the situation the game was built from")]
    MissingSource(&'static str),

    #[error("gave up after {0} consecutive failed situation draws")]
    GenerationAborted(usize),

    #[error("malformed game: {0}")]
    MalformedGame(String),
}
