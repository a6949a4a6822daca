//! Scenario files: the environment, the receiver's rule, solver settings, an
//! optional explicit strategy and simulation settings, all in one JSON document.

use std::path::Path;

use persuade_core::twostep::Stage;
use persuade_core::{
    Atom, Belief, PersuasionEnvironment, PosteriorDistribution, SolverOptions, TwoStepStrategy,
    UpdatingRule,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Version of the scenario and report layout; bumped on breaking changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    /// State names; state 1 is the one the sender wants believed.
    pub states: Vec<String>,
    pub prior: Vec<f64>,
    pub actions: Vec<String>,
    /// `[action][state]`
    pub receiver_utility: Vec<Vec<f64>>,
    /// `[action]`
    pub sender_utility: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySpec {
    /// First-stage distribution over sender posteriors.
    pub first: Vec<Atom>,
    /// Second-stage distribution after each first-stage atom, in the same
    /// order. Omitted for a one-shot strategy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<Vec<Vec<Atom>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSpec {
    pub seed: u64,
    pub replications: u64,
    pub log_paths: usize,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            replications: 1_000_000,
            log_paths: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub environment: EnvironmentSpec,
    pub rule: UpdatingRule,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategySpec>,
    #[serde(default)]
    pub simulation: SimulationSpec,
}

/// A scenario whose parts have passed every module's own checks.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub env: PersuasionEnvironment,
}

impl ScenarioFile {
    pub fn judge_prosecutor(prior_guilty: f64, rule: UpdatingRule) -> Self {
        Self {
            environment: EnvironmentSpec {
                states: vec!["innocent".into(), "guilty".into()],
                prior: vec![1.0 - prior_guilty, prior_guilty],
                actions: vec!["acquit".into(), "convict".into()],
                receiver_utility: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                sender_utility: vec![0.0, 1.0],
            },
            rule,
            solver: SolverOptions::default(),
            strategy: None,
            simulation: SimulationSpec::default(),
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Self::new(file)
    }

    pub fn new(file: ScenarioFile) -> Result<Self> {
        let spec = &file.environment;
        if spec.states.len() != spec.prior.len() {
            return Err(CliError::Validation(format!(
                "{} state names for a prior over {} states",
                spec.states.len(),
                spec.prior.len()
            )));
        }
        if spec.actions.len() != spec.sender_utility.len() {
            return Err(CliError::Validation(format!(
                "{} action names for {} sender utilities",
                spec.actions.len(),
                spec.sender_utility.len()
            )));
        }
        let env = PersuasionEnvironment::new(
            Belief::new(spec.prior.clone())?,
            spec.receiver_utility.clone(),
            spec.sender_utility.clone(),
        )?;
        file.rule.validate()?;
        if file.rule.distort(env.prior(), env.prior()).is_err() {
            return Err(CliError::Validation(format!(
                "rule {} does not apply to {} states",
                file.rule.label(),
                env.state_count()
            )));
        }
        let opts = &file.solver;
        if opts.resolution < 3 || opts.inner_resolution < 3 {
            return Err(CliError::Validation(
                "solver resolutions must be at least 3".into(),
            ));
        }
        if !(opts.classification_margin.is_finite() && opts.classification_margin >= 0.0) {
            return Err(CliError::Validation(
                "classification_margin must be non-negative".into(),
            ));
        }
        if file.simulation.replications == 0 {
            return Err(CliError::Validation("replications must be positive".into()));
        }
        let scenario = Self { file, env };
        if let Some(spec) = &scenario.file.strategy {
            scenario.strategy(spec)?;
        }
        Ok(scenario)
    }

    pub fn rule(&self) -> &UpdatingRule {
        &self.file.rule
    }

    pub fn options(&self) -> &SolverOptions {
        &self.file.solver
    }

    /// The first-stage distribution, checked against the prior.
    pub fn first_stage(&self, spec: &StrategySpec) -> Result<PosteriorDistribution> {
        let first = PosteriorDistribution::new(spec.first.clone())?;
        first.check_bayes_plausible(self.env.prior())?;
        Ok(first)
    }

    /// The explicit two-step strategy, if the scenario gives second stages.
    pub fn strategy(&self, spec: &StrategySpec) -> Result<Option<TwoStepStrategy>> {
        let first = self.first_stage(spec)?;
        let Some(second) = &spec.second else {
            return Ok(None);
        };
        if second.len() != spec.first.len() {
            return Err(CliError::Validation(format!(
                "{} second stages for {} first-stage atoms",
                second.len(),
                spec.first.len()
            )));
        }
        if first.len() != spec.first.len() {
            return Err(CliError::Validation(
                "first-stage atoms must be distinct".into(),
            ));
        }
        let stages = spec
            .first
            .iter()
            .zip(second)
            .map(|(atom, atoms)| {
                let weight = atom.weight / spec.first.iter().map(|a| a.weight).sum::<f64>();
                Ok(Stage {
                    atom: Atom {
                        belief: atom.belief.clone(),
                        weight,
                    },
                    second: PosteriorDistribution::new(atoms.clone())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(TwoStepStrategy::new(self.env.prior(), stages)?))
    }
}
