//! One-shot persuasion of a distorting receiver: the value is the concave
//! envelope of the modified utility `v̌(q) = v̂(D_p(q))` at the prior.

use serde::Serialize;

use crate::belief::{Belief, PosteriorDistribution};
use crate::envelope::{cav_grid_at, cav_threshold, first_true, scan_breakpoints, PiecewiseUtility};
use crate::environment::PersuasionEnvironment;
use crate::error::{PersuasionError, Result};
use crate::experiment::{splitting_experiment, Experiment};
use crate::options::{BreakpointSearch, SolverOptions};
use crate::rules::UpdatingRule;

/// Allowed gap between the threshold closed form and its grid cross-check.
pub const GRID_CROSS_CHECK: f64 = 1e-6;

/// Sender payoff `v(â(q))` with ties broken in the sender's favour.
pub fn indirect_utility(env: &PersuasionEnvironment, belief: &Belief) -> f64 {
    env.sender_utility()[env.best_response(belief)]
}

/// [`indirect_utility`] counting only exact receiver ties.
pub fn strict_indirect_utility(env: &PersuasionEnvironment, belief: &Belief) -> f64 {
    env.sender_utility()[env.strict_best_response(belief)]
}

/// `v̌(q) = v̂(D_p(q))` for a receiver with prior `prior`.
pub fn modified_utility(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    prior: &Belief,
    belief: &Belief,
) -> Result<f64> {
    Ok(indirect_utility(env, &rule.distort(prior, belief)?))
}

/// A binary environment whose indirect utility is a single upward step: the
/// sender gets `low` below the receiver's switch belief and `high` at or above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepUtility {
    pub low: f64,
    pub high: f64,
    pub switch: f64,
}

impl StepUtility {
    pub fn detect(env: &PersuasionEnvironment) -> Option<Self> {
        if !env.is_binary() || env.action_count() != 2 {
            return None;
        }
        let switches = env.switch_beliefs().ok()?;
        if switches.len() != 1 {
            return None;
        }
        let low = indirect_utility(env, &Belief::degenerate(2, 0));
        let high = indirect_utility(env, &Belief::degenerate(2, 1));
        (high > low).then_some(Self {
            low,
            high,
            switch: switches[0],
        })
    }

    /// Smallest `x ∈ [0, 1]` with `pays_high(x)`, for a predicate that is
    /// monotone in `x`. `None` if the high payoff is never reached.
    pub fn locate(&self, pays_high: impl FnMut(f64) -> Result<bool>) -> Result<Option<f64>> {
        first_true(0.0, 1.0, pays_high)
    }

    /// Concave envelope of `low + (high − low)·𝟙{x ≥ t}` at `query`.
    pub fn envelope(
        &self,
        threshold: Option<f64>,
        query: f64,
    ) -> Result<(f64, PosteriorDistribution)> {
        let here = || PosteriorDistribution::dirac(Belief::binary(query).expect("query in [0, 1]"));
        match threshold {
            None => Ok((self.low, here())),
            Some(t) if t <= 0.0 || query >= t => Ok((self.high, here())),
            Some(t) => {
                let r = cav_threshold(t, query)?;
                Ok((self.low + (self.high - self.low) * r.value, r.support))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Closed form for a step utility with a bisected threshold.
    Threshold,
    /// Upper hull of a sampled utility.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneShotSolution {
    pub value: f64,
    pub distribution: PosteriorDistribution,
    pub experiment: Experiment,
    /// Beliefs at which `v̌` jumps.
    pub thresholds: Vec<f64>,
    pub method: SolveMethod,
    /// Grid envelope value, reported alongside the closed form as a cross-check.
    pub grid_value: Option<f64>,
}

/// Beliefs `q` where `v̌` can jump: preimages under `D_p` of the receiver's
/// switch beliefs (monotone distortions) or a scan of `v̌` itself.
pub fn modified_utility_breakpoints(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    prior: &Belief,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    match opts.breakpoint_search {
        BreakpointSearch::Auto if rule.monotone_binary() => {
            for b in env.switch_beliefs()? {
                let hit = first_true(0.0, 1.0, |q| {
                    Ok(rule.distort(prior, &Belief::binary(q)?)?.high() >= b)
                })?;
                out.extend(hit);
            }
        }
        _ => {
            out = scan_breakpoints(
                |q| {
                    modified_utility(env, rule, prior, &Belief::binary(q).expect("grid point"))
                        .unwrap_or(f64::NAN)
                },
                opts.resolution,
            );
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

fn modified_piecewise(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    breakpoints: Vec<f64>,
) -> Result<PiecewiseUtility> {
    let (env, rule) = (env.clone(), rule.clone());
    let prior = env.prior().clone();
    PiecewiseUtility::new(move |q| {
        Belief::binary(q)
            .and_then(|b| modified_utility(&env, &rule, &prior, &b))
            .unwrap_or(f64::NAN)
    })
    .with_breakpoints(breakpoints)
}

/// Optimal one-shot persuasion at the environment's prior.
pub fn solve_oneshot(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    opts: &SolverOptions,
) -> Result<OneShotSolution> {
    env.require_binary()?;
    rule.validate()?;
    let prior = env.prior();
    let p = prior.high();
    let breakpoints = modified_utility_breakpoints(env, rule, prior, opts)?;
    let utility = modified_piecewise(env, rule, breakpoints.clone())?;
    let grid = cav_grid_at(&utility, p, opts.resolution)?;
    if !grid.value.is_finite() {
        return Err(PersuasionError::Numerical(
            "modified utility is not finite".into(),
        ));
    }

    let step = StepUtility::detect(env).filter(|_| rule.monotone_binary());
    let (value, distribution, thresholds, method, grid_value) = match step {
        Some(step) => {
            let t = step.locate(|q| {
                let d = rule.distort(prior, &Belief::binary(q)?)?;
                Ok(strict_indirect_utility(env, &d) >= step.high)
            })?;
            let (value, dist) = step.envelope(t, p)?;
            if (value - grid.value).abs() > GRID_CROSS_CHECK {
                return Err(PersuasionError::Numerical(format!(
                    "threshold value {value} disagrees with grid envelope {}",
                    grid.value
                )));
            }
            (
                value,
                dist,
                t.into_iter().collect(),
                SolveMethod::Threshold,
                Some(grid.value),
            )
        }
        None => (
            grid.value,
            grid.support,
            breakpoints,
            SolveMethod::Grid,
            None,
        ),
    };
    let experiment = splitting_experiment(&distribution, prior)?;
    Ok(OneShotSolution {
        value,
        distribution,
        experiment,
        thresholds,
        method,
        grid_value,
    })
}
