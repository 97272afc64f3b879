//! Discretely-constrained Nash-Cournot games.
//!
//! Computes the set of pure Nash equilibria on the integer lattice by exact
//! best-response enumeration, the set of integral profiles admitting
//! multipliers for the relaxed KKT system, and the inclusion relation between
//! the two, with checkable certificates for every verdict. All arithmetic is
//! exact over rationals.

pub mod analysis;
pub mod error;
pub mod io;
pub mod kkt;
pub mod linfeas;
pub mod model;
pub mod nash;
pub mod psd;
pub mod scalar;

pub use analysis::{
    builtin_example1, builtin_example2, classify, inclusion_report, random_game, sweep, sweep_with,
    Case, GlobalOptNote, InclusionReport, MissedEquilibrium, Norm, RandomShape, Relation, SweepRow,
};
pub use error::Error;
pub use kkt::{
    build_kkt_system, classify_lattice, gradient, mcp_membership, solve_dc_mcp, KktCertificate,
    McpMembership, MembershipRefutation, RelaxedKktSystem,
};
pub use linfeas::{
    solve_feasibility, verify_outcome, FarkasCertificate, FeasibilityOutcome, LinearSystem,
};
pub use model::{
    enumerate_feasible_lattice, enumerate_joint_lattice, evaluate_objective, validate_game,
    validate_game_with, Diagnostic, GameSpec, Limits, PlayerSpec, StrategyProfile, ValidGame,
};
pub use nash::{
    best_response_set, enumerate_dc_nash, is_equilibrium, EquilibriumSet, EquilibriumVerdict,
};
pub use scalar::Scalar;

/// Exact rational scalar used by the CLI and the concrete aliases below.
pub type Rational = num_rational::BigRational;
pub type Game = GameSpec<Rational>;
pub type Valid = ValidGame<Rational>;
pub type Profile = StrategyProfile<Rational>;
pub type Report = InclusionReport<Rational>;
pub type NashSet = EquilibriumSet<Rational>;
