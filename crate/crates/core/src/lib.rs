//! Sender-optimal persuasion of a receiver who updates beliefs with a
//! systematic distortion of Bayes' rule, in one step or in two.
//!
//! The binary-state solvers work on `q = Pr(state 1)`; the primitives in
//! [`belief`], [`experiment`] and [`rules`] handle any finite state space.

pub mod belief;
pub mod envelope;
pub mod environment;
pub mod error;
pub mod experiment;
pub mod grether;
pub mod harness;
pub mod oneshot;
pub mod options;
pub mod rules;
pub mod twostep;

pub use belief::{Atom, Belief, PosteriorDistribution};
pub use envelope::{cav_grid, cav_threshold, EnvelopeResult, PiecewiseUtility};
pub use environment::PersuasionEnvironment;
pub use error::{PersuasionError, Result};
pub use experiment::{
    bayes_update, induced_posterior_distribution, splitting_experiment, Experiment,
};
pub use oneshot::{solve_oneshot, OneShotSolution};
pub use options::{BreakpointSearch, SolverOptions};
pub use rules::{ParamHomeomorphism, UpdatingRule};
pub use twostep::{
    evaluate_strategy, solve_twostep, Classification, TwoStepSolution, TwoStepStrategy,
};
