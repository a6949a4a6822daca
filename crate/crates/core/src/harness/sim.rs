//! Monte Carlo play of the persuasion protocol.
//!
//! Each replication draws a state from the prior, a first signal, updates the
//! receiver with the rule, draws a second signal from the experiment attached
//! to the first signal, updates the receiver again starting from the interim
//! belief, and pays the sender for the receiver's best response. Replications
//! run in chunks; chunk `i` uses ChaCha stream `i` of the master seed and the
//! chunk summaries are merged in index order, so results do not depend on the
//! thread count.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::environment::PersuasionEnvironment;
use crate::error::{PersuasionError, Result};
use crate::experiment::{splitting_experiment, Experiment};
use crate::rules::UpdatingRule;
use crate::twostep::TwoStepStrategy;

pub const CHUNK: u64 = 1 << 16;
pub const MAX_LOGGED_PATHS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimStrategy {
    OneShot(Experiment),
    /// `second[s]` is run after first signal `s`.
    TwoStep {
        first: Experiment,
        second: Vec<Experiment>,
    },
}

impl SimStrategy {
    /// Experiments realizing a two-step strategy: the first splits the prior
    /// into the first-stage atoms, the `k`-th second experiment splits atom `k`.
    pub fn from_two_step(prior: &Belief, strategy: &TwoStepStrategy) -> Result<Self> {
        strategy.validate(prior)?;
        let first_dist = strategy.first()?;
        let first = splitting_experiment(&first_dist, prior)?;
        let second = first_dist
            .atoms()
            .iter()
            .map(|atom| {
                let stage = strategy
                    .stages
                    .iter()
                    .find(|s| s.atom.belief.approx_eq(&atom.belief, 1e-12))
                    .ok_or_else(|| {
                        PersuasionError::InvalidDistribution(
                            "first-stage atoms are not distinct".into(),
                        )
                    })?;
                splitting_experiment(&stage.second, &atom.belief)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::TwoStep { first, second })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub replications: u64,
    pub seed: u64,
    pub env: PersuasionEnvironment,
    pub rule: UpdatingRule,
    pub strategy: SimStrategy,
    /// Number of replications whose belief path is kept, at most [`MAX_LOGGED_PATHS`].
    #[serde(default)]
    pub log_paths: usize,
}

/// One replication's trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefPath {
    pub state: usize,
    pub first_signal: usize,
    pub interim_belief: Vec<f64>,
    pub second_signal: Option<usize>,
    pub final_belief: Vec<f64>,
    pub action: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub replications: u64,
    pub mean: f64,
    pub standard_error: f64,
    /// Fraction of replications in each state that ended in each action, `[state][action]`.
    pub action_frequencies: Vec<Vec<f64>>,
    pub belief_paths: Vec<BeliefPath>,
}

/// Receiver beliefs and actions for every reachable signal path.
struct Tables {
    state: WeightedIndex<f64>,
    first: Vec<Option<WeightedIndex<f64>>>,
    interim: Vec<Option<Belief>>,
    /// `[first signal]`: `None` when there is no second stage or the receiver is certain.
    second: Vec<Option<SecondStage>>,
    /// Action after a first signal when no second signal is drawn.
    direct_action: Vec<usize>,
}

struct SecondStage {
    signals: Vec<Option<WeightedIndex<f64>>>,
    finals: Vec<Option<Belief>>,
    actions: Vec<usize>,
}

fn row_sampler(row: &[f64]) -> Option<WeightedIndex<f64>> {
    WeightedIndex::new(row.iter().copied()).ok()
}

fn signal_samplers(exp: &Experiment) -> Vec<Option<WeightedIndex<f64>>> {
    (0..exp.state_count())
        .map(|t| row_sampler(exp.row(t)))
        .collect()
}

impl Tables {
    fn build(config: &SimConfig) -> Result<Self> {
        let env = &config.env;
        let prior = env.prior();
        let rule = &config.rule;
        let first = match &config.strategy {
            SimStrategy::OneShot(e) | SimStrategy::TwoStep { first: e, .. } => e,
        };
        prior.expect_dim(first.state_count())?;
        let n_first = first.signal_count();
        let mut interim = vec![None; n_first];
        let mut direct_action = vec![0; n_first];
        let mut second: Vec<Option<SecondStage>> = (0..n_first).map(|_| None).collect();
        if let SimStrategy::TwoStep { second: taus, .. } = &config.strategy {
            if taus.len() != n_first {
                return Err(PersuasionError::InvalidExperiment(format!(
                    "{} second experiments for {n_first} first signals",
                    taus.len()
                )));
            }
        }
        for s in 0..n_first {
            if first.marginal(prior, s) <= 0.0 {
                continue;
            }
            let d = rule.update(first, prior, s)?;
            direct_action[s] = env.best_response(&d);
            if let SimStrategy::TwoStep { second: taus, .. } = &config.strategy {
                if d.full_support() {
                    let tau = &taus[s];
                    prior.expect_dim(tau.state_count())?;
                    let mut finals = vec![None; tau.signal_count()];
                    let mut actions = vec![0; tau.signal_count()];
                    for t in 0..tau.signal_count() {
                        if tau.marginal(&d, t) > 0.0 {
                            let r = rule.update(tau, &d, t)?;
                            actions[t] = env.best_response(&r);
                            finals[t] = Some(r);
                        }
                    }
                    second[s] = Some(SecondStage {
                        signals: signal_samplers(tau),
                        finals,
                        actions,
                    });
                }
            }
            interim[s] = Some(d);
        }
        let state = WeightedIndex::new(prior.probs().iter().copied())
            .map_err(|e| PersuasionError::InvalidBelief(e.to_string()))?;
        Ok(Self {
            state,
            first: signal_samplers(first),
            interim,
            second,
            direct_action,
        })
    }
}

#[derive(Clone)]
struct Partial {
    n: u64,
    mean: f64,
    m2: f64,
    counts: Vec<Vec<u64>>,
    paths: Vec<BeliefPath>,
}

impl Partial {
    fn merge(&mut self, other: Partial) {
        let n = self.n + other.n;
        if n == 0 {
            return;
        }
        let delta = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        self.mean += delta * nb / n as f64;
        self.m2 += other.m2 + delta * delta * na * nb / n as f64;
        self.n = n;
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.paths.extend(other.paths);
    }
}

fn run_chunk(config: &SimConfig, tables: &Tables, chunk: u64, count: u64, log: usize) -> Partial {
    let env = &config.env;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(chunk);
    let mut part = Partial {
        n: 0,
        mean: 0.0,
        m2: 0.0,
        counts: vec![vec![0; env.action_count()]; env.state_count()],
        paths: Vec::new(),
    };
    for i in 0..count {
        let state = tables.state.sample(&mut rng);
        let s = tables.first[state]
            .as_ref()
            .expect("reachable state has a signal row")
            .sample(&mut rng);
        let (action, t) = match &tables.second[s] {
            Some(stage) => {
                let t = stage.signals[state]
                    .as_ref()
                    .expect("second experiment row")
                    .sample(&mut rng);
                (stage.actions[t], Some(t))
            }
            None => (tables.direct_action[s], None),
        };
        let payoff = env.sender_utility()[action];
        part.n += 1;
        let delta = payoff - part.mean;
        part.mean += delta / part.n as f64;
        part.m2 += delta * (payoff - part.mean);
        part.counts[state][action] += 1;
        if (i as usize) < log {
            let interim = tables.interim[s]
                .as_ref()
                .expect("drawn signal is reachable");
            let fin = match (t, &tables.second[s]) {
                (Some(t), Some(stage)) => {
                    stage.finals[t].as_ref().expect("drawn signal is reachable")
                }
                _ => interim,
            };
            part.paths.push(BeliefPath {
                state,
                first_signal: s,
                interim_belief: interim.probs().to_vec(),
                second_signal: t,
                final_belief: fin.probs().to_vec(),
                action,
            });
        }
    }
    part
}

/// Plays the protocol `replications` times.
pub fn simulate(config: &SimConfig) -> Result<SimResult> {
    if config.replications == 0 {
        return Err(PersuasionError::InvalidParameter(
            "replications must be at least 1".into(),
        ));
    }
    config.env.validate()?;
    config.rule.validate()?;
    let tables = Tables::build(config)?;
    let log = config.log_paths.min(MAX_LOGGED_PATHS);
    let chunks = config.replications.div_ceil(CHUNK);
    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(config.replications - c * CHUNK);
            run_chunk(config, &tables, c, count, if c == 0 { log } else { 0 })
        })
        .collect();
    let mut total = Partial {
        n: 0,
        mean: 0.0,
        m2: 0.0,
        counts: vec![vec![0; config.env.action_count()]; config.env.state_count()],
        paths: Vec::new(),
    };
    for part in partials {
        total.merge(part);
    }
    let n = total.n as f64;
    let variance = if total.n > 1 {
        total.m2 / (n - 1.0)
    } else {
        0.0
    };
    let action_frequencies = total
        .counts
        .iter()
        .map(|row| {
            let visits: u64 = row.iter().sum();
            row.iter()
                .map(|c| {
                    if visits == 0 {
                        0.0
                    } else {
                        *c as f64 / visits as f64
                    }
                })
                .collect()
        })
        .collect();
    Ok(SimResult {
        replications: total.n,
        mean: total.mean,
        standard_error: (variance / n).sqrt(),
        action_frequencies,
        belief_paths: total.paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(strategy: SimStrategy, rule: UpdatingRule, reps: u64) -> SimConfig {
        SimConfig {
            replications: reps,
            seed: 7,
            env: PersuasionEnvironment::judge_prosecutor(0.3).unwrap(),
            rule,
            strategy,
            log_paths: 10,
        }
    }

    fn guilty_split() -> Experiment {
        Experiment::new(vec![vec![4.0 / 7.0, 3.0 / 7.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn bayesian_optimum_pays_point_six() {
        let r = simulate(&config(
            SimStrategy::OneShot(guilty_split()),
            UpdatingRule::Bayesian,
            200_000,
        ))
        .unwrap();
        assert!((r.mean - 0.6).abs() < 3.0 * r.standard_error);
        assert_eq!(r.action_frequencies[1], vec![0.0, 1.0]);
        assert_eq!(r.belief_paths.len(), 10);
    }

    #[test]
    fn null_both_stages_is_exact() {
        let strategy = SimStrategy::TwoStep {
            first: Experiment::null(2),
            second: vec![Experiment::null(2)],
        };
        let r = simulate(&config(strategy, UpdatingRule::Bayesian, 1000)).unwrap();
        assert_eq!((r.mean, r.standard_error), (0.0, 0.0));
    }

    #[test]
    fn replay_is_bit_identical() {
        let c = config(
            SimStrategy::OneShot(guilty_split()),
            UpdatingRule::linear(0.5).unwrap(),
            150_000,
        );
        assert_eq!(simulate(&c).unwrap(), simulate(&c).unwrap());
    }

    #[test]
    fn mismatched_second_stage_rejected() {
        let strategy = SimStrategy::TwoStep {
            first: guilty_split(),
            second: vec![Experiment::null(2)],
        };
        assert!(simulate(&config(strategy, UpdatingRule::Bayesian, 10)).is_err());
        let c = config(
            SimStrategy::OneShot(guilty_split()),
            UpdatingRule::Bayesian,
            0,
        );
        assert!(simulate(&c).is_err());
    }
}
