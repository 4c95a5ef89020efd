use thiserror::Error;

/// Errors surfaced by game construction, classification and the solvers.
#[derive(Debug, Error)]
pub enum GameError {
    /// Malformed input: out-of-range probability, non-finite payoff, bad grid, ...
    #[error("validation error: {0}")]
    Validation(String),

    /// Strategy shape does not match the game (evidence vs. no-evidence).
    #[error("strategy kind mismatch: {0}")]
    KindMismatch(String),

    /// The neither-favorable knife edge, which the closed-form results skip.
    #[error("unsupported payoff region: {0}")]
    UnsupportedRegion(String),

    /// A precondition on the detector was violated (e.g. not omnipotent).
    #[error("detector precondition failed: {0}")]
    DetectorPrecondition(String),

    /// The numeric solver found no equilibrium. Finite games always have one,
    /// so this signals a bug rather than a valid outcome.
    #[error("solver failure: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, GameError>;
