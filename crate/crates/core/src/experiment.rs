//! Blackwell experiments, Bayesian updating and the belief-splitting construction.

use serde::{Deserialize, Serialize};

use crate::belief::{Belief, PosteriorDistribution, SUM_TOLERANCE};
use crate::error::{PersuasionError, Result};
use crate::rules::UpdatingRule;

/// State-conditional signal distributions, stored as a `[state][signal]` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Experiment {
    conditionals: Vec<Vec<f64>>,
}

impl Experiment {
    pub fn new(conditionals: Vec<Vec<f64>>) -> Result<Self> {
        let signals = conditionals
            .first()
            .map(Vec::len)
            .ok_or_else(|| PersuasionError::InvalidExperiment("no states".into()))?;
        if signals == 0 {
            return Err(PersuasionError::InvalidExperiment("no signals".into()));
        }
        for (state, row) in conditionals.iter().enumerate() {
            if row.len() != signals {
                return Err(PersuasionError::InvalidExperiment(format!(
                    "state {state} has {} signals, expected {signals}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite() || *x < 0.0 || *x > 1.0) {
                return Err(PersuasionError::InvalidExperiment(format!(
                    "state {state} has an entry outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(PersuasionError::InvalidExperiment(format!(
                    "state {state} row sums to {sum}"
                )));
            }
        }
        Ok(Self { conditionals })
    }

    /// The uninformative experiment with a single signal.
    pub fn null(states: usize) -> Self {
        Self {
            conditionals: vec![vec![1.0]; states],
        }
    }

    /// Signal `s` is sent exactly in state `s`.
    pub fn fully_revealing(states: usize) -> Self {
        Self {
            conditionals: (0..states)
                .map(|t| {
                    (0..states)
                        .map(|s| if s == t { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn state_count(&self) -> usize {
        self.conditionals.len()
    }

    pub fn signal_count(&self) -> usize {
        self.conditionals[0].len()
    }

    pub fn is_null(&self) -> bool {
        self.signal_count() == 1
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.conditionals[state]
    }

    pub fn prob(&self, state: usize, signal: usize) -> f64 {
        self.conditionals[state][signal]
    }

    /// Likelihoods `σ_θ(s)` of one signal across states.
    pub fn likelihoods(&self, signal: usize) -> Vec<f64> {
        self.conditionals.iter().map(|row| row[signal]).collect()
    }

    /// Unconditional probability of `signal` under `prior`.
    pub fn marginal(&self, prior: &Belief, signal: usize) -> f64 {
        self.conditionals
            .iter()
            .zip(prior.probs())
            .map(|(row, p)| p * row[signal])
            .sum()
    }

    pub(crate) fn check_signal(&self, prior: &Belief, signal: usize) -> Result<()> {
        prior.expect_dim(self.state_count())?;
        if signal >= self.signal_count() {
            return Err(PersuasionError::SignalOutOfRange {
                signal,
                count: self.signal_count(),
            });
        }
        if self.marginal(prior, signal) <= 0.0 {
            return Err(PersuasionError::ZeroProbabilitySignal { signal });
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for Experiment {
    type Error = PersuasionError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Experiment::new(rows)
    }
}

impl From<Experiment> for Vec<Vec<f64>> {
    fn from(e: Experiment) -> Self {
        e.conditionals
    }
}

/// Bayesian posterior after observing `signal`.
pub fn bayes_update(exp: &Experiment, prior: &Belief, signal: usize) -> Result<Belief> {
    exp.check_signal(prior, signal)?;
    Belief::from_weights(
        prior
            .probs()
            .iter()
            .zip(&exp.conditionals)
            .map(|(p, row)| p * row[signal])
            .collect(),
    )
}

/// Distribution of the receiver's updated beliefs, weighted by the true
/// (Bayesian) signal probabilities. Zero-probability signals are dropped and
/// coinciding posteriors merged.
pub fn induced_posterior_distribution(
    exp: &Experiment,
    prior: &Belief,
    rule: &UpdatingRule,
) -> Result<PosteriorDistribution> {
    prior.expect_dim(exp.state_count())?;
    prior.require_full_support()?;
    let mut pairs = Vec::with_capacity(exp.signal_count());
    for s in 0..exp.signal_count() {
        let weight = exp.marginal(prior, s);
        if weight > 0.0 {
            pairs.push((rule.update(exp, prior, s)?, weight));
        }
    }
    PosteriorDistribution::from_weighted(pairs)
}

/// Experiment whose Bayesian posteriors are exactly the atoms of `target`:
/// one signal per atom with `σ_θ(s_k) = w_k q_k(θ) / p(θ)`.
pub fn splitting_experiment(target: &PosteriorDistribution, prior: &Belief) -> Result<Experiment> {
    target.check_bayes_plausible(prior)?;
    for (k, atom) in target.atoms().iter().enumerate() {
        for (state, (q, p)) in atom.belief.probs().iter().zip(prior.probs()).enumerate() {
            if *q > 0.0 && *p <= 0.0 {
                return Err(PersuasionError::AbsoluteContinuityViolated { atom: k, state });
            }
        }
    }
    let conditionals = prior
        .probs()
        .iter()
        .enumerate()
        .map(|(state, &p)| {
            let raw: Vec<f64> = if p > 0.0 {
                target
                    .atoms()
                    .iter()
                    .map(|a| a.weight * a.belief.get(state) / p)
                    .collect()
            } else {
                // unreachable state: any row will do
                target.atoms().iter().map(|a| a.weight).collect()
            };
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|x| (x / sum).min(1.0)).collect()
        })
        .collect();
    Experiment::new(conditionals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn guilty_split() -> Experiment {
        Experiment::new(vec![vec![4.0 / 7.0, 3.0 / 7.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn bayes_hand_arithmetic() {
        let p = Belief::binary(0.3).unwrap();
        let q = bayes_update(&guilty_split(), &p, 1).unwrap();
        assert!((q.high() - 0.5).abs() < 1e-15);
        let q0 = bayes_update(&guilty_split(), &p, 0).unwrap();
        assert_eq!(q0.high(), 0.0);
    }

    #[test]
    fn null_experiment_is_identity() {
        let p = Belief::new(vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(bayes_update(&Experiment::null(3), &p, 0).unwrap(), p);
    }

    #[test]
    fn fully_revealing() {
        let p = Belief::binary(0.3).unwrap();
        let q = bayes_update(&Experiment::fully_revealing(2), &p, 1).unwrap();
        assert_eq!(q, Belief::degenerate(2, 1));
    }

    #[test]
    fn zero_probability_signal() {
        let exp = Experiment::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let p = Belief::binary(0.3).unwrap();
        assert_eq!(
            bayes_update(&exp, &p, 1),
            Err(PersuasionError::ZeroProbabilitySignal { signal: 1 })
        );
        assert!(matches!(
            bayes_update(&exp, &p, 2),
            Err(PersuasionError::SignalOutOfRange { .. })
        ));
    }

    #[test]
    fn induced_bayesian_and_linear() {
        let p = Belief::binary(0.3).unwrap();
        let bayes =
            induced_posterior_distribution(&guilty_split(), &p, &UpdatingRule::Bayesian).unwrap();
        let want = PosteriorDistribution::binary(&[(0.0, 0.4), (0.5, 0.6)]).unwrap();
        assert!(bayes.max_abs_diff(&want) < 1e-12);

        let linear = UpdatingRule::Linear { alpha: 0.5 };
        let got = induced_posterior_distribution(&guilty_split(), &p, &linear).unwrap();
        let want = PosteriorDistribution::binary(&[(0.15, 0.4), (0.4, 0.6)]).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn induced_null_is_dirac() {
        let p = Belief::binary(0.3).unwrap();
        let d = induced_posterior_distribution(&Experiment::null(2), &p, &UpdatingRule::Bayesian)
            .unwrap();
        assert_eq!(d, PosteriorDistribution::dirac(p));
    }

    #[test]
    fn splitting_reproduces_hand_rows() {
        let p = Belief::binary(0.3).unwrap();
        let target = PosteriorDistribution::binary(&[(0.0, 0.4), (0.5, 0.6)]).unwrap();
        let exp = splitting_experiment(&target, &p).unwrap();
        // canonical atom order puts q = 0.5 first
        assert!((exp.prob(1, 0) - 1.0).abs() < 1e-15);
        assert_eq!(exp.prob(1, 1), 0.0);
        assert!((exp.prob(0, 0) - 3.0 / 7.0).abs() < 1e-15);
        assert!((exp.prob(0, 1) - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn splitting_dirac_is_null() {
        let p = Belief::binary(0.3).unwrap();
        let exp = splitting_experiment(&PosteriorDistribution::dirac(p.clone()), &p).unwrap();
        assert!(exp.is_null());
    }

    #[test]
    fn splitting_gradual_first_stage_round_trips() {
        let p = Belief::binary(0.3).unwrap();
        let target = PosteriorDistribution::binary(&[(0.15, 4.0 / 7.0), (0.5, 3.0 / 7.0)]).unwrap();
        let exp = splitting_experiment(&target, &p).unwrap();
        let back = induced_posterior_distribution(&exp, &p, &UpdatingRule::Bayesian).unwrap();
        assert!(back.max_abs_diff(&target) < 1e-12);
    }

    #[test]
    fn splitting_rejects_implausible_and_discontinuous() {
        let p = Belief::binary(0.3).unwrap();
        let off = PosteriorDistribution::binary(&[(0.0, 0.5), (0.5, 0.5)]).unwrap();
        assert!(matches!(
            splitting_experiment(&off, &p),
            Err(PersuasionError::NotBayesPlausible { .. })
        ));
        let degenerate_prior = Belief::binary(0.0).unwrap();
        let sneaky = PosteriorDistribution::binary(&[(0.0, 0.5), (1e-11, 0.5)]).unwrap();
        assert!(matches!(
            splitting_experiment(&sneaky, &degenerate_prior),
            Err(PersuasionError::AbsoluteContinuityViolated { atom: 0, state: 1 })
        ));
    }
}
