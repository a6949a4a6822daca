//! Two-step persuasion.
//!
//! After the first signal the sender holds the Bayesian belief `q` and the
//! receiver holds `d = D_p(q)`. A second Bayesian posterior `r` of the sender
//! corresponds to the receiver Bayesian posterior `r' ∝ r·d/q`, which the
//! receiver then distorts with `D_d`. So the interim problem is a common-prior
//! problem with distortion `D^II_q(r) = D_d(r')` and the interim value is the
//! concave envelope of `v̌^q = v̂ ∘ D^II_q` at `q`.
//!
//! Degenerate interim beliefs:
//! * `d` degenerate: the receiver is certain and never moves again; the
//!   interim payoff is `v̂(d)`.
//! * `q` degenerate, `d` interior: the only plausible second stage is
//!   `δ_q`, the receiver sees an uninformative second signal and ends at
//!   `D_d(d)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::{Atom, Belief, PosteriorDistribution};
use crate::envelope::{cav_grid_at, first_true, scan_breakpoints, PiecewiseUtility};
use crate::environment::PersuasionEnvironment;
use crate::error::{PersuasionError, Result};
use crate::oneshot::{
    indirect_utility, modified_utility_breakpoints, solve_oneshot, strict_indirect_utility,
    OneShotSolution, StepUtility,
};
use crate::options::{BreakpointSearch, SolverOptions};
use crate::rules::UpdatingRule;

/// Receiver belief after the second signal, expressed through the sender's
/// second Bayesian posterior `r`: `D_{D_p(q)}(r')` with `r' ∝ r·D_p(q)/q`.
pub fn transform_distortion(
    rule: &UpdatingRule,
    prior: &Belief,
    first: &Belief,
    second: &Belief,
) -> Result<Belief> {
    first.require_full_support()?;
    let d = rule.distort(prior, first)?;
    if !d.full_support() {
        return Err(PersuasionError::DegenerateInterimBelief);
    }
    let reweighted = receiver_posterior(&d, first, second)?;
    rule.distort(&d, &reweighted)
}

/// The receiver's Bayesian posterior `r' ∝ r·d/q` that shares a signal with
/// the sender's posterior `r`.
fn receiver_posterior(d: &Belief, q: &Belief, r: &Belief) -> Result<Belief> {
    r.expect_dim(q.dim())?;
    if d == q {
        return Ok(r.clone());
    }
    Belief::from_weights(
        r.probs()
            .iter()
            .zip(d.probs())
            .zip(q.probs())
            .map(|((r, d), q)| r * d / q)
            .collect(),
    )
}

/// The receiver's final belief when the sender's posteriors are `q` then `r`.
fn final_receiver_belief(
    rule: &UpdatingRule,
    prior: &Belief,
    first: &Belief,
    second: &Belief,
) -> Result<Belief> {
    let d = rule.distort(prior, first)?;
    if !d.full_support() {
        return Ok(d);
    }
    if !first.full_support() {
        return rule.distort(&d, &d);
    }
    rule.distort(&d, &receiver_posterior(&d, first, second)?)
}

/// `v̌^q(r)`, the sender's payoff when the sender's two posteriors are `q` then `r`.
pub fn second_stage_utility(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    prior: &Belief,
    first: &Belief,
    second: &Belief,
) -> Result<f64> {
    Ok(indirect_utility(
        env,
        &final_receiver_belief(rule, prior, first, second)?,
    ))
}

fn strict_second_stage_at(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    prior: &Belief,
    first: &Belief,
    r: f64,
) -> Result<f64> {
    Ok(strict_indirect_utility(
        env,
        &final_receiver_belief(rule, prior, first, &Belief::binary(r)?)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InterimMethod {
    Threshold,
    Grid,
    /// The interim belief is degenerate; see the module notes.
    Degenerate,
}

/// Solution of the second-stage problem at one interim belief.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterimSolution {
    /// `v^II(q)`.
    pub value: f64,
    /// Sender posterior at which `v̌^q` switches to its high value, when it is a step.
    pub threshold: Option<f64>,
    /// Optimal second-stage distribution `ρ₂(q)`.
    pub distribution: PosteriorDistribution,
    pub method: InterimMethod,
}

fn second_stage_at(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    prior: &Belief,
    first: &Belief,
    r: f64,
) -> Result<f64> {
    second_stage_utility(env, rule, prior, first, &Belief::binary(r)?)
}

/// `v^II(q)`: the best second stage for a sender at belief `first`.
pub fn interim_value(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    prior: &Belief,
    first: &Belief,
    opts: &SolverOptions,
) -> Result<InterimSolution> {
    env.require_binary()?;
    first.expect_dim(2)?;
    let q = first.high();
    let d = rule.distort(prior, first)?;
    if !d.full_support() || !first.full_support() {
        return Ok(InterimSolution {
            value: second_stage_utility(env, rule, prior, first, first)?,
            threshold: None,
            distribution: PosteriorDistribution::dirac(first.clone()),
            method: InterimMethod::Degenerate,
        });
    }

    if let Some(step) = StepUtility::detect(env).filter(|_| rule.monotone_binary()) {
        let t =
            step.locate(|r| Ok(strict_second_stage_at(env, rule, prior, first, r)? >= step.high))?;
        let (value, distribution) = step.envelope(t, q)?;
        return Ok(InterimSolution {
            value,
            threshold: t,
            distribution,
            method: InterimMethod::Threshold,
        });
    }

    let breakpoints = match opts.breakpoint_search {
        BreakpointSearch::Auto if rule.monotone_binary() => {
            let mut out = Vec::new();
            for b in env.switch_beliefs()? {
                let hit = first_true(0.0, 1.0, |r| {
                    let reweighted = receiver_posterior(&d, first, &Belief::binary(r)?)?;
                    Ok(rule.distort(&d, &reweighted)?.high() >= b)
                })?;
                out.extend(hit);
            }
            out.sort_by(f64::total_cmp);
            out.dedup();
            out
        }
        _ => scan_breakpoints(
            |r| second_stage_at(env, rule, prior, first, r).unwrap_or(f64::NAN),
            opts.inner_resolution,
        ),
    };
    let (env2, rule2, prior2, first2) = (env.clone(), rule.clone(), prior.clone(), first.clone());
    let utility = PiecewiseUtility::new(move |r| {
        second_stage_at(&env2, &rule2, &prior2, &first2, r).unwrap_or(f64::NAN)
    })
    .with_breakpoints(breakpoints)?;
    let env_result = cav_grid_at(&utility, q, opts.inner_resolution)?;
    Ok(InterimSolution {
        value: env_result.value,
        threshold: None,
        distribution: env_result.support,
        method: InterimMethod::Grid,
    })
}

/// A first-stage distribution together with a second-stage distribution for each of its atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStepStrategy {
    pub stages: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub atom: Atom,
    pub second: PosteriorDistribution,
}

impl TwoStepStrategy {
    /// Checks Bayes plausibility at `prior` and at every first-stage atom.
    pub fn new(prior: &Belief, stages: Vec<Stage>) -> Result<Self> {
        let strategy = Self { stages };
        strategy.validate(prior)?;
        Ok(strategy)
    }

    pub fn validate(&self, prior: &Belief) -> Result<()> {
        self.first()?.check_bayes_plausible(prior)?;
        for stage in &self.stages {
            stage.second.check_bayes_plausible(&stage.atom.belief)?;
        }
        Ok(())
    }

    pub fn first(&self) -> Result<PosteriorDistribution> {
        PosteriorDistribution::new(self.stages.iter().map(|s| s.atom.clone()).collect())
    }

    /// Second stages chosen optimally for each atom of `first`.
    pub fn with_optimal_second_stage(
        env: &PersuasionEnvironment,
        rule: &UpdatingRule,
        first: &PosteriorDistribution,
        opts: &SolverOptions,
    ) -> Result<Self> {
        let stages = first
            .atoms()
            .iter()
            .map(|atom| {
                let interim = interim_value(env, rule, env.prior(), &atom.belief, opts)?;
                Ok(Stage {
                    atom: atom.clone(),
                    second: interim.distribution,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(env.prior(), stages)
    }
}

/// Mean-preserving contraction of the one-shot split `{0, t}` that moves each
/// atom halfway toward the prior: `{(p/2, 1 − p/t), ((p + t)/2, p/t)}`.
pub fn gradual_first_stage(threshold: f64, prior_high: f64) -> Result<PosteriorDistribution> {
    if !(threshold > prior_high && threshold <= 1.0 && prior_high > 0.0) {
        return Err(PersuasionError::DomainError(format!(
            "gradual split needs 0 < p < t ≤ 1, got p = {prior_high}, t = {threshold}"
        )));
    }
    let w = prior_high / threshold;
    PosteriorDistribution::binary(&[
        (prior_high / 2.0, 1.0 - w),
        ((prior_high + threshold) / 2.0, w),
    ])
}

/// Gradual persuasion: contract the one-shot optimum halfway toward the prior,
/// then persuade optimally at each interim belief.
pub fn gradual_persuasion(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    oneshot: &OneShotSolution,
    opts: &SolverOptions,
) -> Result<TwoStepStrategy> {
    let t = *oneshot
        .thresholds
        .first()
        .ok_or_else(|| PersuasionError::DomainError("one-shot solution has no threshold".into()))?;
    let first = gradual_first_stage(t, env.prior().high())?;
    TwoStepStrategy::with_optimal_second_stage(env, rule, &first, opts)
}

/// Exact ex-ante sender payoff `E_{ρ₁} E_{ρ₂(q)} v̌^q(r)`.
pub fn evaluate_strategy(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    strategy: &TwoStepStrategy,
) -> Result<f64> {
    strategy.validate(env.prior())?;
    let mut total = 0.0;
    for stage in &strategy.stages {
        let mut inner = 0.0;
        for atom in stage.second.atoms() {
            inner += atom.weight
                * second_stage_utility(env, rule, env.prior(), &stage.atom.belief, &atom.belief)?;
        }
        total += stage.atom.weight * inner;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Better,
    Worse,
    Indifferent,
}

impl Classification {
    pub fn compare(two_step: f64, one_shot: f64, margin: f64) -> Self {
        let gap = two_step - one_shot;
        if gap > margin {
            Self::Better
        } else if gap < -margin {
            Self::Worse
        } else {
            Self::Indifferent
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Better => "better",
            Self::Worse => "worse",
            Self::Indifferent => "indifferent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterimAtom {
    pub atom: Atom,
    pub solution: InterimSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStepSolution {
    pub value: f64,
    /// Envelope of `v^II` at the prior, before any skip option.
    pub two_step_value: f64,
    pub first_stage: PosteriorDistribution,
    pub interim: Vec<InterimAtom>,
    pub oneshot: OneShotSolution,
    pub classification: Classification,
    pub margin: f64,
    /// Beliefs declared as kinks of `v^II` to the outer envelope.
    pub breakpoints: Vec<f64>,
    /// True when `allow_skip_second` is set and stopping after one update pays more.
    pub skipped_second: bool,
}

impl TwoStepSolution {
    pub fn strategy(&self, prior: &Belief) -> Result<TwoStepStrategy> {
        TwoStepStrategy::new(
            prior,
            self.interim
                .iter()
                .map(|i| Stage {
                    atom: i.atom.clone(),
                    second: i.solution.distribution.clone(),
                })
                .collect(),
        )
    }
}

/// Beliefs where `v^II` can kink or jump: jumps of the one-shot `v̌`, the first
/// `q` whose null second stage already pays the top, and the points where a
/// clamped linear distortion leaves the boundary.
fn interim_breakpoints(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let prior = env.prior();
    let mut out = modified_utility_breakpoints(env, rule, prior, opts)?;
    if let Some(step) = StepUtility::detect(env).filter(|_| rule.monotone_binary()) {
        let diagonal = step.locate(|q| {
            Ok(strict_second_stage_at(env, rule, prior, &Belief::binary(q)?, q)? >= step.high)
        })?;
        out.extend(diagonal);
    }
    if let UpdatingRule::Linear { alpha } = rule {
        let p = prior.high();
        for target in [0.0, 1.0] {
            let q = (target - (1.0 - alpha) * p) / alpha;
            if q > 0.0 && q < 1.0 {
                out.push(q);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    Ok(out)
}

/// Optimal two-step persuasion and its comparison with one-shot persuasion.
pub fn solve_twostep(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    opts: &SolverOptions,
) -> Result<TwoStepSolution> {
    env.require_binary()?;
    rule.validate()?;
    let oneshot = solve_oneshot(env, rule, opts)?;
    let prior = env.prior().clone();
    let breakpoints = interim_breakpoints(env, rule, opts)?;

    let (env2, rule2, prior2, opts2) = (env.clone(), rule.clone(), prior.clone(), opts.clone());
    let utility = PiecewiseUtility::new(move |q| {
        Belief::binary(q)
            .and_then(|b| interim_value(&env2, &rule2, &prior2, &b, &opts2))
            .map(|s| s.value)
            .unwrap_or(f64::NAN)
    })
    .with_breakpoints(breakpoints.clone())?;
    let outer = cav_grid_at(&utility, prior.high(), opts.resolution)?;
    if !outer.value.is_finite() {
        return Err(PersuasionError::Numerical(
            "interim value is not finite".into(),
        ));
    }

    let interim = outer
        .support
        .atoms()
        .par_iter()
        .map(|atom| {
            Ok(InterimAtom {
                atom: atom.clone(),
                solution: interim_value(env, rule, &prior, &atom.belief, opts)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let two_step_value: f64 = interim
        .iter()
        .map(|i| i.atom.weight * i.solution.value)
        .sum();

    let skipped_second = opts.allow_skip_second && oneshot.value > two_step_value;
    let value = if skipped_second {
        oneshot.value
    } else {
        two_step_value
    };
    Ok(TwoStepSolution {
        value,
        two_step_value,
        first_stage: outer.support,
        interim,
        classification: Classification::compare(value, oneshot.value, opts.classification_margin),
        margin: opts.classification_margin,
        oneshot,
        breakpoints,
        skipped_second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::linear_threshold;

    fn jp(p: f64) -> PersuasionEnvironment {
        PersuasionEnvironment::judge_prosecutor(p).unwrap()
    }

    fn b(q: f64) -> Belief {
        Belief::binary(q).unwrap()
    }

    #[test]
    fn bayesian_transform_is_identity() {
        let p = b(0.3);
        for r in [0.0, 0.2, 0.77, 1.0] {
            let got = transform_distortion(&UpdatingRule::Bayesian, &p, &p, &b(r)).unwrap();
            assert!((got.high() - r).abs() < 1e-15);
        }
    }

    #[test]
    fn grether_second_stage_threshold() {
        let env = jp(0.3);
        let rule = UpdatingRule::grether(2.0, 1.0).unwrap();
        let p = env.prior().clone();
        assert_eq!(
            second_stage_utility(&env, &rule, &p, &p, &b(0.93)).unwrap(),
            1.0
        );
        assert_eq!(
            second_stage_utility(&env, &rule, &p, &p, &b(0.92)).unwrap(),
            0.0
        );
        let sol = interim_value(&env, &rule, &p, &p, &SolverOptions::default()).unwrap();
        assert!((sol.threshold.unwrap() - 0.343 / 0.37).abs() < 1e-12);
        assert!((sol.value - 0.3 * 0.37 / 0.343).abs() < 1e-12);
    }

    #[test]
    fn bayesian_interim_is_oneshot() {
        let env = jp(0.3);
        let sol = interim_value(
            &env,
            &UpdatingRule::Bayesian,
            env.prior(),
            env.prior(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!((sol.value - 0.6).abs() < 1e-12);
    }

    #[test]
    fn degenerate_interim_beliefs() {
        let env = jp(0.3);
        let opts = SolverOptions::default();
        // overreaction clamps the receiver to certainty of innocence
        let rule = UpdatingRule::linear(1.5).unwrap();
        assert!(matches!(
            transform_distortion(&rule, env.prior(), &b(0.05), &b(0.5)),
            Err(PersuasionError::DegenerateInterimBelief)
        ));
        let sol = interim_value(&env, &rule, env.prior(), &b(0.05), &opts).unwrap();
        assert_eq!((sol.value, sol.method), (0.0, InterimMethod::Degenerate));
        // underreaction leaves an interior receiver belief at q = 0
        let rule = UpdatingRule::linear(0.5).unwrap();
        let sol = interim_value(&env, &rule, env.prior(), &b(0.0), &opts).unwrap();
        assert_eq!(sol.value, 0.0);
        let sol = interim_value(&env, &rule, env.prior(), &b(1.0), &opts).unwrap();
        assert_eq!(sol.value, 1.0);
    }

    #[test]
    fn gradual_first_stage_atoms() {
        let t = linear_threshold(0.5, 0.3);
        let rho = gradual_first_stage(t, 0.3).unwrap();
        let want = PosteriorDistribution::binary(&[(0.15, 4.0 / 7.0), (0.5, 3.0 / 7.0)]).unwrap();
        assert!(rho.max_abs_diff(&want) < 1e-12);
        assert!(gradual_first_stage(0.2, 0.3).is_err());
    }

    #[test]
    fn evaluate_rejects_implausible() {
        let env = jp(0.3);
        let stages = vec![Stage {
            atom: Atom {
                belief: b(0.5),
                weight: 1.0,
            },
            second: PosteriorDistribution::dirac(b(0.5)),
        }];
        let bad = TwoStepStrategy { stages };
        assert!(matches!(
            evaluate_strategy(&env, &UpdatingRule::Bayesian, &bad),
            Err(PersuasionError::NotBayesPlausible { .. })
        ));
    }

    #[test]
    fn dirac_first_stage_gives_interim_value() {
        let env = jp(0.3);
        let opts = SolverOptions::default();
        let rule = UpdatingRule::grether(0.5, 1.0).unwrap();
        let first = PosteriorDistribution::dirac(env.prior().clone());
        let strategy =
            TwoStepStrategy::with_optimal_second_stage(&env, &rule, &first, &opts).unwrap();
        let v = evaluate_strategy(&env, &rule, &strategy).unwrap();
        let interim = interim_value(&env, &rule, env.prior(), env.prior(), &opts).unwrap();
        assert!((v - interim.value).abs() < 1e-9);
    }

    #[test]
    fn classification_margin() {
        assert_eq!(
            Classification::compare(0.5, 0.5 - 5e-7, 1e-6),
            Classification::Indifferent
        );
        assert_eq!(
            Classification::compare(0.5, 0.4, 1e-6),
            Classification::Better
        );
        assert_eq!(
            Classification::compare(0.4, 0.5, 1e-6),
            Classification::Worse
        );
    }
}
