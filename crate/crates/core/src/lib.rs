//! Optimal stopping over Bermudan strategy sets under non-linear evaluations.
//!
//! The crate works on a finite filtered probability space given as a tree
//! ([`tree`]). Stopping strategies take values in a grid of stopping times
//! ([`stopping`]), rewards are assessed by operators generated from node-local
//! one-step rules ([`evaluation`]), and the value of the stopping problem is
//! obtained by backward induction ([`snell`]). The [`verify`] module recomputes
//! everything by exhaustive enumeration of the strategy set and checks the
//! structural identities between the two routes; [`axioms`] property-tests the
//! operators themselves.

pub mod axioms;
pub mod config;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod report;
pub mod runner;
pub mod snell;
pub mod stopping;
pub mod tree;
pub mod variable;
pub mod verify;

pub use axioms::{check_axioms, AxiomOptions, AxiomReport};
pub use config::{Check, ExperimentConfig};
pub use error::{Error, Result};
pub use evaluation::{
    entropic_utility, g_driver_evaluation, linear_expectation, robust_expectation, square_of_mean,
    Ambiguity, Candidate, Claims, Driver, Evaluation, OperatorSpec,
};
pub use report::{CheckReport, Status};
pub use runner::{run, Command, RunReport};
pub use snell::{
    dpp_residual, hitting_time, make_rho_martingale, payoff_family, snell_backward, strict_value,
    ValueFamily,
};
pub use stopping::{
    canonical_partition, count_from, enumerate_from, AdaptedProcess, BermudanGrid, Event,
    StoppingTime, ThetaStrategy,
};
pub use tree::{build_tree, random_tree, FiltrationTree, TreeSpec};
pub use variable::{is_measurable, RandomVariable};
pub use verify::{oracle_family, oracle_value, Solved, VerifyOptions};

/// Absolute tolerance for identities between random variables.
pub const EQ_TOL: f64 = 1e-9;
