use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::error::{PersuasionError, Result};

/// Expected-utility gap below which the receiver is treated as indifferent.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// States, prior, actions, receiver utility `u(a, θ)` and sender utility `v(a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersuasionEnvironment {
    prior: Belief,
    /// `[action][state]`
    receiver_utility: Vec<Vec<f64>>,
    /// `[action]`
    sender_utility: Vec<f64>,
}

impl PersuasionEnvironment {
    pub fn new(
        prior: Belief,
        receiver_utility: Vec<Vec<f64>>,
        sender_utility: Vec<f64>,
    ) -> Result<Self> {
        let env = Self {
            prior,
            receiver_utility,
            sender_utility,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.prior.full_support() {
            return Err(PersuasionError::InvalidEnvironment(
                "prior must have full support".into(),
            ));
        }
        let actions = self.sender_utility.len();
        if actions == 0 {
            return Err(PersuasionError::InvalidEnvironment("no actions".into()));
        }
        if self.receiver_utility.len() != actions {
            return Err(PersuasionError::InvalidEnvironment(format!(
                "receiver utility has {} rows for {actions} actions",
                self.receiver_utility.len()
            )));
        }
        for (a, row) in self.receiver_utility.iter().enumerate() {
            if row.len() != self.prior.dim() {
                return Err(PersuasionError::InvalidEnvironment(format!(
                    "receiver utility for action {a} has {} entries for {} states",
                    row.len(),
                    self.prior.dim()
                )));
            }
        }
        let all = self
            .receiver_utility
            .iter()
            .flatten()
            .chain(&self.sender_utility);
        if all.into_iter().any(|x| !x.is_finite()) {
            return Err(PersuasionError::InvalidEnvironment(
                "utilities must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Binary state, acquit/convict; the receiver convicts iff the belief in guilt is at least ½,
    /// the sender is paid 1 for conviction.
    pub fn judge_prosecutor(prior_guilty: f64) -> Result<Self> {
        Self::new(
            Belief::binary(prior_guilty)?,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![0.0, 1.0],
        )
    }

    /// Binary state and action where the receiver takes action 1 iff the belief is at least `cutoff`.
    pub fn threshold(prior_high: f64, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(PersuasionError::InvalidEnvironment(format!(
                "cutoff {cutoff} outside (0, 1)"
            )));
        }
        Self::new(
            Belief::binary(prior_high)?,
            vec![vec![cutoff, 0.0], vec![0.0, 1.0 - cutoff]],
            vec![0.0, 1.0],
        )
    }

    pub fn with_prior(&self, prior: Belief) -> Result<Self> {
        Self::new(
            prior,
            self.receiver_utility.clone(),
            self.sender_utility.clone(),
        )
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    pub fn state_count(&self) -> usize {
        self.prior.dim()
    }

    pub fn action_count(&self) -> usize {
        self.sender_utility.len()
    }

    pub fn receiver_utility(&self) -> &[Vec<f64>] {
        &self.receiver_utility
    }

    pub fn sender_utility(&self) -> &[f64] {
        &self.sender_utility
    }

    pub fn is_binary(&self) -> bool {
        self.state_count() == 2
    }

    pub fn require_binary(&self) -> Result<()> {
        if self.is_binary() {
            Ok(())
        } else {
            Err(PersuasionError::UnsupportedDimension {
                states: self.state_count(),
            })
        }
    }

    /// Receiver best response with ties broken toward the sender's preferred action.
    /// Expected utilities within [`TIE_TOLERANCE`] of the best count as ties.
    pub fn best_response(&self, belief: &Belief) -> usize {
        self.best_response_within(belief, TIE_TOLERANCE)
    }

    /// Best response counting only exact ties. Solvers locate thresholds with
    /// this so that beliefs reproduced with rounding error still land on the
    /// sender's side under [`best_response`](Self::best_response).
    pub fn strict_best_response(&self, belief: &Belief) -> usize {
        self.best_response_within(belief, 0.0)
    }

    fn best_response_within(&self, belief: &Belief, tolerance: f64) -> usize {
        let eu: Vec<f64> = self
            .receiver_utility
            .iter()
            .map(|row| row.iter().zip(belief.probs()).map(|(u, q)| u * q).sum())
            .collect();
        let best = eu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut choice = 0;
        let mut choice_v = f64::NEG_INFINITY;
        for (a, e) in eu.iter().enumerate() {
            if *e >= best - tolerance && self.sender_utility[a] > choice_v {
                choice = a;
                choice_v = self.sender_utility[a];
            }
        }
        choice
    }

    /// Beliefs (probability of state 1) in `(0, 1)` where two actions' expected
    /// utilities cross; the receiver's best response is constant between them.
    pub fn switch_beliefs(&self) -> Result<Vec<f64>> {
        self.require_binary()?;
        let lines: Vec<(f64, f64)> = self
            .receiver_utility
            .iter()
            .map(|row| (row[0], row[1] - row[0]))
            .collect();
        let mut points = Vec::new();
        for (i, (c1, s1)) in lines.iter().enumerate() {
            for (c2, s2) in &lines[i + 1..] {
                if (s1 - s2).abs() > 0.0 {
                    let x = (c2 - c1) / (s1 - s2);
                    if x > 0.0 && x < 1.0 {
                        points.push(x);
                    }
                }
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        Ok(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn judge_prosecutor_best_response() {
        let env = PersuasionEnvironment::judge_prosecutor(0.3).unwrap();
        assert_eq!(env.best_response(&Belief::binary(0.5).unwrap()), 1);
        assert_eq!(env.best_response(&Belief::binary(0.2).unwrap()), 0);
        assert_eq!(env.best_response(&Belief::binary(0.9).unwrap()), 1);
        assert_eq!(env.switch_beliefs().unwrap(), vec![0.5]);
    }

    #[test]
    fn rejects_degenerate_prior() {
        assert!(PersuasionEnvironment::judge_prosecutor(0.0).is_err());
        assert!(PersuasionEnvironment::threshold(0.3, 1.0).is_err());
    }

    #[test]
    fn rejects_shape_mismatch() {
        let p = Belief::binary(0.3).unwrap();
        assert!(
            PersuasionEnvironment::new(p.clone(), vec![vec![1.0, 0.0]], vec![0.0, 1.0]).is_err()
        );
        assert!(PersuasionEnvironment::new(p, vec![vec![1.0], vec![0.0]], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn three_action_switches() {
        // acquit / lesser charge / convict
        let env = PersuasionEnvironment::new(
            Belief::binary(0.3).unwrap(),
            vec![vec![1.0, 0.0], vec![0.7, 0.7], vec![0.0, 1.0]],
            vec![0.0, 0.5, 1.0],
        )
        .unwrap();
        let s = env.switch_beliefs().unwrap();
        assert_eq!(s.len(), 3);
        assert!((s[0] - 0.3).abs() < 1e-12 && (s[2] - 0.7).abs() < 1e-12);
        assert_eq!(env.best_response(&Belief::binary(0.5).unwrap()), 1);
    }
}
