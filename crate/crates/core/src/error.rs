use thiserror::Error;

/// Errors raised by game evaluation, optimization and equilibrium search.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("objective returned a non-finite value at {at}")]
    Evaluation { at: f64 },

    #[error("{context}: no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence {
        context: String,
        iterations: usize,
        residual: f64,
        /// Last few iterates, oldest first.
        tail: Vec<f64>,
    },

    #[error("{context}: target lies outside the image of the forward transform (residual {residual:e})")]
    Infeasible { context: String, residual: f64 },
}

impl GameError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GameError::InvalidInput(msg.into())
    }

    /// Prefixes the context of convergence-type errors, leaving the rest untouched.
    pub fn within(self, outer: impl AsRef<str>) -> Self {
        match self {
            GameError::Convergence {
                context,
                iterations,
                residual,
                tail,
            } => GameError::Convergence {
                context: format!("{}: {}", outer.as_ref(), context),
                iterations,
                residual,
                tail,
            },
            GameError::Infeasible { context, residual } => GameError::Infeasible {
                context: format!("{}: {}", outer.as_ref(), context),
                residual,
            },
            other => other,
        }
    }

    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, GameError::Convergence { .. } | GameError::Infeasible { .. })
    }
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
