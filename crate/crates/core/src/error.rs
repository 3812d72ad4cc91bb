use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid mixed action: {0}")]
    MixedAction(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("numerical failure in solver: {0}")]
    Numerical(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("horizon {horizon} unreachable for {player}: updating time at block cap {cap} is {reached}")]
    HorizonUnreachable {
        player: &'static str,
        horizon: f64,
        cap: u64,
        reached: f64,
    },

    #[error("trajectory exceeds {0} recorded points; use a streaming observer")]
    TrajectoryTooLong(usize),

    #[error("strategy failure: {0}")]
    Strategy(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
