//! Local search over `k` spanning trees plus a forest, lowering the number
//! of oversized forest components and then the legal order.

pub mod conditions;
pub mod exchange;
pub mod moves;
pub mod neighbours;
pub mod order;
pub mod run;
pub mod special;
pub mod state;

use thiserror::Error;

pub use exchange::{exchange, Exchange};
pub use moves::{Move, MoveKind, MoveStats, Potential};
pub use order::{greedy_legal_order, minimal_legal_order, LegalOrder};
pub use run::{run, Outcome, OutcomeStatus, StuckDiagnostics};
pub use state::{select_root, DecompositionState, Residue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("need k >= 1 and 1 <= d <= 2(k + 1), got k = {k}, d = {d}")]
    BadParameters { k: usize, d: usize },
    #[error("invalid state: {0}")]
    Invalid(String),
    #[error("move rejected: {0}")]
    Rejected(String),
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EngineConfig {
    /// Stuck states with at most this many vertices go to the brute-force oracle.
    pub oracle_threshold: usize,
    pub oracle_max_edges: usize,
    pub composite_depth: usize,
    pub composite_budget: usize,
    pub vocabulary_limit: usize,
    pub order_budget: usize,
    pub max_moves: usize,
    /// Re-check state invariants after every move.
    pub debug_asserts: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            oracle_threshold: 10,
            oracle_max_edges: 24,
            composite_depth: 3,
            composite_budget: 400,
            vocabulary_limit: 12,
            order_budget: 20_000,
            max_moves: 100_000,
            debug_asserts: cfg!(debug_assertions),
        }
    }
}

pub fn check_parameters(k: usize, d: usize) -> Result<(), EngineError> {
    if k == 0 || d == 0 || d > 2 * (k + 1) {
        return Err(EngineError::BadParameters { k, d });
    }
    Ok(())
}
