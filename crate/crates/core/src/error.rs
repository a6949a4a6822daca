use thiserror::Error;

use crate::belief::Belief;
use crate::experiment::Experiment;

/// A concrete instance where an updating rule disagrees with its declared distortion.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub experiment: Experiment,
    pub signal: usize,
    pub updated: Belief,
    pub distorted: Belief,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PersuasionError {
    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid posterior distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid rule parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected} states, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("prior must have full support")]
    PriorNotFullSupport,

    #[error("signal {signal} out of range (experiment has {count} signals)")]
    SignalOutOfRange { signal: usize, count: usize },

    #[error("signal {signal} has zero marginal probability under the prior")]
    ZeroProbabilitySignal { signal: usize },

    #[error("distribution is not Bayes-plausible (mean deviates by {deviation:e})")]
    NotBayesPlausible { deviation: f64 },

    #[error("atom {atom} puts mass on state {state} which the prior rules out")]
    AbsoluteContinuityViolated { atom: usize, state: usize },

    #[error("{rule} updating is only defined for {supported} states, got {states}")]
    UnsupportedStateCount {
        rule: &'static str,
        supported: usize,
        states: usize,
    },

    #[error("only binary-state environments are supported here, got {states} states")]
    UnsupportedDimension { states: usize },

    #[error("threshold {0} outside (0, 1]")]
    InvalidThreshold(f64),

    #[error("receiver's interim belief lacks full support")]
    DegenerateInterimBelief,

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("updating rule does not systematically distort beliefs (deviation {:e} at signal {})", .0.deviation, .0.signal)]
    NotSystematic(Box<Counterexample>),

    #[error("property violated: {0}")]
    PropertyViolation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, PersuasionError>;
