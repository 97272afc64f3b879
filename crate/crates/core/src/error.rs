use std::fmt;

use crate::model::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("game failed validation:\n{0}")]
    Validation(DiagnosticList),
    #[error(
        "player {player} has a non-convex own block; complementarity analysis requires convexity"
    )]
    NonConvexOwnBlock { player: usize },
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("lattice of {size} points exceeds the cap of {cap}")]
    LatticeTooLarge { size: u128, cap: u64 },
    #[error("profile is infeasible for player {player}: {reason}")]
    InfeasibleProfile { player: usize, reason: String },
    #[error("player {player} has an empty feasible set")]
    EmptyFeasibleSet { player: usize },
    #[error("player {player} needs {patterns} complementarity patterns, budget is {budget}")]
    PatternBudgetExceeded {
        player: usize,
        patterns: u128,
        budget: u64,
    },
    #[error("complementarity solutions outside the equilibrium set: {0}")]
    InclusionViolated(String),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(String),
    #[error("malformed linear system: {0}")]
    MalformedSystem(String),
    #[error("random game generation gave up after {0} attempts")]
    GenerationExhausted(usize),
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("no player index {0}")]
    UnknownPlayer(usize),
}

/// Validation diagnostics, rendered one per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosticList(pub Vec<Diagnostic>);

impl fmt::Display for DiagnosticList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {d}")?;
        }
        Ok(())
    }
}
