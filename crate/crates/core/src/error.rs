use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A derivative or quotient was requested where the underlying formula degenerates.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// No height in [0, 1] puts the column (x1, x2, .) inside the body.
    #[error("infeasible column at ({x1}, {x2}): no height in [0, 1] is admissible")]
    InfeasibleColumn { x1: f64, x2: f64 },

    #[error("point ({0}, {1}, {2}) is not in the payoff space")]
    NotInPayoffSpace(f64, f64, f64),

    /// The hedging problem has no feasible payoff within the search limits.
    #[error("solver infeasible: {0}")]
    Infeasible(String),

    #[error("optimal set at term {index} is not a singleton (w1 width {width:e})")]
    NonSingleton { index: usize, width: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
