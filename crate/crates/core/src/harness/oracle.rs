//! Oracles that recompute solver outputs by different routes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::belief::Belief;
use crate::envelope::first_true;
use crate::environment::PersuasionEnvironment;
use crate::error::{PersuasionError, Result};
use crate::oneshot::indirect_utility;
use crate::options::SolverOptions;
use crate::rules::UpdatingRule;
use crate::twostep::{solve_twostep, transform_distortion};

/// Deviation below which a rule counts as divisible.
pub const DIVISIBLE_TOLERANCE: f64 = 1e-8;
/// Smallest two-step versus one-shot gap reported by the gap search.
pub const GAP_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisibilityReport {
    pub rule: String,
    pub grid: usize,
    pub max_deviation: f64,
    /// `(q, r)` where the deviation is largest.
    pub witness: Option<(f64, f64)>,
    /// Grid points skipped because the receiver's interim belief was degenerate.
    pub skipped: usize,
    pub divisible: bool,
}

/// Largest gap between two-step updating through `D^II_q` and one-step
/// updating through `D_p` over an interior `(q, r)` grid.
pub fn check_divisibility(
    rule: &UpdatingRule,
    prior: &Belief,
    grid: usize,
) -> Result<DivisibilityReport> {
    prior.expect_dim(2)?;
    prior.require_full_support()?;
    let points: Vec<f64> = (1..=grid).map(|i| i as f64 / (grid + 1) as f64).collect();
    let mut max_deviation: f64 = 0.0;
    let mut witness = None;
    let mut skipped = 0;
    for &q in &points {
        let qb = Belief::binary(q)?;
        for &r in &points {
            let rb = Belief::binary(r)?;
            let two = match transform_distortion(rule, prior, &qb, &rb) {
                Ok(b) => b,
                Err(PersuasionError::DegenerateInterimBelief) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let dev = two.max_abs_diff(&rule.distort(prior, &rb)?);
            if dev > max_deviation || witness.is_none() {
                max_deviation = max_deviation.max(dev);
                witness = Some((q, r));
            }
        }
    }
    Ok(DivisibilityReport {
        rule: rule.label(),
        grid,
        max_deviation,
        witness,
        skipped,
        divisible: max_deviation < DIVISIBLE_TOLERANCE,
    })
}

/// Concave envelope at `query` by exhaustive search over two-point supports
/// drawn from a uniform grid plus `extra` points. In one dimension two points
/// suffice, so this is exact on the sample set.
pub fn brute_force_cav(
    f: impl Fn(f64) -> f64,
    extra: &[f64],
    query: &Belief,
    resolution: usize,
) -> Result<f64> {
    if !query.is_binary() {
        return Err(PersuasionError::UnsupportedDimension {
            states: query.dim(),
        });
    }
    if resolution < 2 {
        return Err(PersuasionError::DomainError(
            "resolution must be at least 2".into(),
        ));
    }
    let x = query.high();
    let mut xs: Vec<f64> = (0..resolution)
        .map(|i| i as f64 / (resolution - 1) as f64)
        .collect();
    xs.extend(extra.iter().copied().filter(|e| (0.0..=1.0).contains(e)));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let vals: Vec<f64> = xs.iter().map(|&v| f(v)).collect();
    let split = xs.partition_point(|&v| v < x);
    let mut best = f64::NEG_INFINITY;
    if split < xs.len() && xs[split] == x {
        best = vals[split];
    }
    for i in 0..split {
        for j in split..xs.len() {
            if xs[j] == x {
                continue;
            }
            let (a, b) = (xs[i], xs[j]);
            let v = ((b - x) * vals[i] + (x - a) * vals[j]) / (b - a);
            best = best.max(v);
        }
    }
    Ok(best)
}

/// `v^II(q)` computed over the receiver's second posterior `x` instead of the
/// sender's. A signal that leaves the receiver (prior `d`) at `x` is
/// `q₁x/d₁ + q₀(1−x)/d₀` times as likely for the sender as for the receiver,
/// so `v^II(q)` is the envelope at `d` of `x ↦ (q₁x/d₁ + q₀(1−x)/d₀)·v̂(D_d(x))`.
pub fn receiver_coordinate_interim(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    q: f64,
    resolution: usize,
) -> Result<f64> {
    env.require_binary()?;
    let qb = Belief::binary(q)?;
    let d = rule.distort(env.prior(), &qb)?;
    if !d.full_support() {
        return Ok(indirect_utility(env, &d));
    }
    let (d0, d1) = (d.get(0), d.get(1));
    let vhat = |x: f64| -> f64 {
        Belief::binary(x)
            .and_then(|b| rule.distort(&d, &b))
            .map(|b| indirect_utility(env, &b))
            .unwrap_or(f64::NAN)
    };
    let mut extra = Vec::new();
    for b in env.switch_beliefs()? {
        let hit = first_true(0.0, 1.0, |x| {
            Ok(rule.distort(&d, &Belief::binary(x)?)?.high() >= b)
        })?;
        extra.extend(hit);
    }
    let h = |x: f64| (q * x / d1 + (1.0 - q) * (1.0 - x) / d0) * vhat(x);
    brute_force_cav(h, &extra, &d, resolution)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapWitness {
    pub prior: f64,
    pub cutoff: Option<f64>,
    pub one_shot: f64,
    pub two_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub rule: String,
    pub trials: usize,
    pub largest_gap: f64,
    pub witness: Option<GapWitness>,
    /// A gap above [`GAP_THRESHOLD`] was found. Finding none proves nothing.
    pub found: bool,
}

/// Searches binary threshold environments for a two-step versus one-shot gap.
/// The first trial uses `env` itself; the rest draw a prior and a receiver cutoff.
pub fn search_conjecture_gap(
    rule: &UpdatingRule,
    env: &PersuasionEnvironment,
    trials: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<GapReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut largest_gap: f64 = 0.0;
    let mut witness = None;
    for trial in 0..trials {
        let (candidate, cutoff) = if trial == 0 {
            (env.clone(), None)
        } else {
            let p = rng.gen_range(0.02..0.98);
            let c = rng.gen_range(0.05..0.95);
            (PersuasionEnvironment::threshold(p, c)?, Some(c))
        };
        let sol = solve_twostep(&candidate, rule, opts)?;
        let gap = (sol.two_step_value - sol.oneshot.value).abs();
        if witness.is_none() || gap > largest_gap {
            largest_gap = largest_gap.max(gap);
            witness = Some(GapWitness {
                prior: candidate.prior().high(),
                cutoff,
                one_shot: sol.oneshot.value,
                two_step: sol.two_step_value,
            });
        }
    }
    Ok(GapReport {
        rule: rule.label(),
        trials,
        largest_gap,
        witness,
        found: largest_gap > GAP_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::cav_threshold;

    #[test]
    fn brute_force_indicator() {
        let f = |q: f64| if q >= 0.5 { 1.0 } else { 0.0 };
        let v = brute_force_cav(f, &[], &Belief::binary(0.3).unwrap(), 1001).unwrap();
        assert!((v - cav_threshold(0.5, 0.3).unwrap().value).abs() < 1e-12);
        let g = |q: f64| q * (1.0 - q);
        let v = brute_force_cav(g, &[], &Belief::binary(0.37).unwrap(), 1001).unwrap();
        assert!((v - 0.37 * 0.63).abs() < 1e-6);
        assert!(brute_force_cav(g, &[], &Belief::uniform(3), 11).is_err());
    }

    #[test]
    fn divisibility_verdicts() {
        let p = Belief::binary(0.3).unwrap();
        let bayes = check_divisibility(&UpdatingRule::Bayesian, &p, 40).unwrap();
        assert_eq!(bayes.max_deviation, 0.0);
        assert!(
            check_divisibility(&UpdatingRule::geometric(1.7).unwrap(), &p, 40)
                .unwrap()
                .divisible
        );
        let g = check_divisibility(&UpdatingRule::grether(2.0, 1.0).unwrap(), &p, 40).unwrap();
        assert!(!g.divisible && g.max_deviation > 1e-3);
    }

    #[test]
    fn receiver_coordinates_linear_underreaction() {
        // sender at 0.15, receiver at 0.225
        let env = PersuasionEnvironment::judge_prosecutor(0.3).unwrap();
        let rule = UpdatingRule::linear(0.5).unwrap();
        let v = receiver_coordinate_interim(&env, &rule, 0.15, 4001).unwrap();
        assert!((v - 0.22164).abs() < 1e-4);
    }
}
