//! Persuasion and voting in committees that face a lobbyist.
//!
//! Committee members can buy private information before voting on a policy
//! that a lobbyist wants enacted. The lobbyist shapes the public information
//! they start from. This crate computes each member's persuasion thresholds,
//! the equilibrium of every dictatorship, the most-demanding member, the
//! lobbyist's optimal signal with and without a restricted menu of
//! experiments, and audits of how voting mechanisms compare.

pub mod belief;
pub mod dictatorship;
pub mod lab;
pub mod mechanism;
pub mod persuasion;
pub mod preferences;

pub use belief::{
    aggregate_posteriors, convex_order_compare, Belief, BeliefDistribution, BeliefError,
    ConvexOrder, StateLabel,
};
pub use dictatorship::{
    dictatorship_equilibrium, most_demanding, DictatorshipEquilibrium, OutcomeStats,
};
pub use lab::{
    benchmark_signal_outcome, constrained_lobbyist_best, counterexample_report, counterexample_s5,
    dominance_compare, prop1_payoff_check, theorem1_audit, verify_claim11, AuditTable,
    Claim11Config, Claim11Report, CounterexampleReport, DominanceVerdict, ExperimentMenu,
    LabContext, LabError, Verdict,
};
pub use mechanism::{make_catalog_mechanism, CatalogKind, MechanismError, VotingMechanism};
pub use persuasion::{
    optimal_signal, persuasion_thresholds, upper_concave_envelope, GridFunction,
    PersuasionThresholds, DEFAULT_GRID_N,
};
pub use preferences::{Committee, CostKernel, MemberSpec, PreferenceError};
