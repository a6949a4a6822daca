//! Beliefs over a finite state space and finitely supported distributions over beliefs.
//!
//! Binary-state code throughout the crate uses the convention that index 1 is
//! the "high" state (guilty, in the judge–prosecutor reading) and a scalar
//! belief `q` means `probs[1]`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{PersuasionError, Result};

/// Tolerance on `Σ probs = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;
/// Componentwise tolerance under which two beliefs are the same atom.
pub const MERGE_TOLERANCE: f64 = 1e-12;
/// Tolerance on the mean constraint for Bayes plausibility.
pub const PLAUSIBILITY_TOLERANCE: f64 = 1e-10;

/// A probability vector indexed by state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(PersuasionError::InvalidBelief("no states".into()));
        }
        if let Some(x) = probs
            .iter()
            .find(|x| !x.is_finite() || **x < 0.0 || **x > 1.0)
        {
            return Err(PersuasionError::InvalidBelief(format!(
                "entry {x} outside [0, 1]"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(PersuasionError::InvalidBelief(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(Self(probs))
    }

    /// Binary belief with probability `p` on state 1.
    pub fn binary(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(PersuasionError::InvalidBelief(format!(
                "binary belief {p} outside [0, 1]"
            )));
        }
        Ok(Self(vec![1.0 - p, p]))
    }

    /// Normalizes nonnegative weights into a belief.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(PersuasionError::InvalidBelief(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(PersuasionError::InvalidBelief("weights sum to zero".into()));
        }
        Ok(Self(weights.into_iter().map(|w| w / total).collect()))
    }

    /// Normalizes log-weights; `-inf` entries become exact zeros.
    pub fn from_log_weights(logs: &[f64]) -> Result<Self> {
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY || max.is_nan() {
            return Err(PersuasionError::InvalidBelief(
                "log-weights are all -inf".into(),
            ));
        }
        if max == f64::INFINITY {
            // A single infinite coordinate dominates.
            let n_inf = logs.iter().filter(|l| **l == f64::INFINITY).count() as f64;
            return Ok(Self(
                logs.iter()
                    .map(|l| {
                        if *l == f64::INFINITY {
                            1.0 / n_inf
                        } else {
                            0.0
                        }
                    })
                    .collect(),
            ));
        }
        Self::from_weights(logs.iter().map(|l| (l - max).exp()).collect())
    }

    pub fn uniform(states: usize) -> Self {
        Self(vec![1.0 / states as f64; states])
    }

    pub fn degenerate(states: usize, state: usize) -> Self {
        let mut probs = vec![0.0; states];
        probs[state] = 1.0;
        Self(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, state: usize) -> f64 {
        self.0[state]
    }

    /// Probability of state 1 for a binary belief.
    pub fn high(&self) -> f64 {
        self.0[1]
    }

    pub fn is_binary(&self) -> bool {
        self.0.len() == 2
    }

    pub fn full_support(&self) -> bool {
        self.0.iter().all(|x| *x > 0.0)
    }

    pub fn max_abs_diff(&self, other: &Belief) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Belief, tol: f64) -> bool {
        self.dim() == other.dim() && self.max_abs_diff(other) <= tol
    }

    pub fn expect_dim(&self, states: usize) -> Result<()> {
        if self.dim() != states {
            return Err(PersuasionError::DimensionMismatch {
                expected: states,
                actual: self.dim(),
            });
        }
        Ok(())
    }

    pub fn require_full_support(&self) -> Result<()> {
        if self.full_support() {
            Ok(())
        } else {
            Err(PersuasionError::PriorNotFullSupport)
        }
    }

    fn lexicographic(&self, other: &Belief) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl TryFrom<Vec<f64>> for Belief {
    type Error = PersuasionError;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Belief::new(probs)
    }
}

impl From<Belief> for Vec<f64> {
    fn from(b: Belief) -> Self {
        b.0
    }
}

/// One support point of a [`PosteriorDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub belief: Belief,
    pub weight: f64,
}

/// A finitely supported distribution over beliefs.
///
/// Atoms are kept in canonical form: beliefs equal within [`MERGE_TOLERANCE`]
/// are merged (weight-averaged) and atoms are sorted lexicographically by
/// probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct PosteriorDistribution {
    atoms: Vec<Atom>,
}

impl PosteriorDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| PersuasionError::InvalidDistribution("no atoms".into()))?;
        let dim = first.belief.dim();
        for atom in &atoms {
            atom.belief.expect_dim(dim)?;
            if !(atom.weight.is_finite() && atom.weight > 0.0) {
                return Err(PersuasionError::InvalidDistribution(format!(
                    "weight {} is not positive",
                    atom.weight
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > PLAUSIBILITY_TOLERANCE {
            return Err(PersuasionError::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Self::canonical(atoms, total))
    }

    /// Builds a distribution from raw (belief, weight) pairs whose weights need
    /// not be normalized; zero-weight pairs are dropped.
    pub fn from_weighted(pairs: Vec<(Belief, f64)>) -> Result<Self> {
        let atoms: Vec<Atom> = pairs
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(belief, weight)| Atom { belief, weight })
            .collect();
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if atoms.is_empty() || !total.is_finite() {
            return Err(PersuasionError::InvalidDistribution(
                "no positive-weight atoms".into(),
            ));
        }
        Self::new(
            atoms
                .into_iter()
                .map(|a| Atom {
                    weight: a.weight / total,
                    ..a
                })
                .collect(),
        )
    }

    /// Binary convenience: `(probability of state 1, weight)` pairs.
    pub fn binary(pairs: &[(f64, f64)]) -> Result<Self> {
        let atoms = pairs
            .iter()
            .map(|&(q, w)| {
                Ok(Atom {
                    belief: Belief::binary(q)?,
                    weight: w,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }

    pub fn dirac(belief: Belief) -> Self {
        Self {
            atoms: vec![Atom {
                belief,
                weight: 1.0,
            }],
        }
    }

    fn canonical(atoms: Vec<Atom>, total: f64) -> Self {
        // (weighted sum of beliefs, weight, first belief seen, merge count)
        let mut merged: Vec<(Vec<f64>, f64, Belief, usize)> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            let w = atom.weight / total;
            match merged
                .iter()
                .position(|m| m.2.max_abs_diff(&atom.belief) <= MERGE_TOLERANCE)
            {
                Some(i) => {
                    let m = &mut merged[i];
                    for (s, x) in m.0.iter_mut().zip(atom.belief.probs()) {
                        *s += w * x;
                    }
                    m.1 += w;
                    m.3 += 1;
                }
                None => {
                    let sum = atom.belief.probs().iter().map(|x| w * x).collect();
                    merged.push((sum, w, atom.belief, 1));
                }
            }
        }
        let mut atoms: Vec<Atom> = merged
            .into_iter()
            .map(|(sum, weight, rep, count)| {
                // a lone atom keeps its belief bit for bit
                let belief = if count == 1 {
                    rep
                } else {
                    Belief::from_weights(sum).unwrap_or(rep)
                };
                Atom { belief, weight }
            })
            .collect();
        atoms.sort_by(|a, b| a.belief.lexicographic(&b.belief));
        Self { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].belief.dim()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim()];
        for atom in &self.atoms {
            for (m, x) in mean.iter_mut().zip(atom.belief.probs()) {
                *m += atom.weight * x;
            }
        }
        mean
    }

    pub fn plausibility_gap(&self, anchor: &Belief) -> f64 {
        self.mean()
            .iter()
            .zip(anchor.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_bayes_plausible(&self, anchor: &Belief) -> bool {
        self.dim() == anchor.dim() && self.plausibility_gap(anchor) <= PLAUSIBILITY_TOLERANCE
    }

    /// Fails with `NotBayesPlausible` unless the mean equals `anchor`.
    pub fn check_bayes_plausible(&self, anchor: &Belief) -> Result<()> {
        anchor.expect_dim(self.dim())?;
        let deviation = self.plausibility_gap(anchor);
        if deviation > PLAUSIBILITY_TOLERANCE {
            return Err(PersuasionError::NotBayesPlausible { deviation });
        }
        Ok(())
    }

    /// Expectation of `f` over atoms.
    pub fn expect<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&Belief) -> Result<f64>,
    {
        self.atoms
            .iter()
            .try_fold(0.0, |acc, a| Ok(acc + a.weight * f(&a.belief)?))
    }

    /// `(probability of state 1, weight)` pairs for binary distributions.
    pub fn binary_points(&self) -> Vec<(f64, f64)> {
        self.atoms
            .iter()
            .map(|a| (a.belief.high(), a.weight))
            .collect()
    }

    /// Largest componentwise/weight gap after matching atoms in canonical order.
    pub fn max_abs_diff(&self, other: &PosteriorDistribution) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.atoms
            .iter()
            .zip(&other.atoms)
            .map(|(a, b)| {
                a.belief
                    .max_abs_diff(&b.belief)
                    .max((a.weight - b.weight).abs())
            })
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<Atom>> for PosteriorDistribution {
    type Error = PersuasionError;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        PosteriorDistribution::new(atoms)
    }
}

impl From<PosteriorDistribution> for Vec<Atom> {
    fn from(d: PosteriorDistribution) -> Self {
        d.atoms
    }
}
