//! Closed forms for the α–β rule in the judge–prosecutor environment.
//!
//! Everything here is computed directly from the formulas, without the
//! envelope machinery, so the generic solvers can be checked against it.
//! Powers of odds ratios are taken in log space.

use serde::Serialize;

use crate::environment::PersuasionEnvironment;
use crate::error::{PersuasionError, Result};
use crate::oneshot::solve_oneshot;
use crate::options::SolverOptions;
use crate::rules::UpdatingRule;
use crate::twostep::{interim_value, solve_twostep, Classification};

/// Log-odds exponent gaps below this (relative) count as zero when reading signs.
pub const SIGN_TOLERANCE: f64 = 1e-9;
/// Interior points at which the curvature of `f` is measured.
pub const CURVATURE_POINTS: usize = 25;

fn check_params(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
        return Err(PersuasionError::DomainError(format!(
            "alpha and beta must be positive, got ({alpha}, {beta})"
        )));
    }
    Ok(())
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(PersuasionError::DomainError(format!(
            "{name} = {x} outside (0, 1)"
        )));
    }
    Ok(())
}

fn logit(x: f64) -> f64 {
    x.ln() - (-x).ln_1p()
}

/// `1 / (1 + e^l)` without overflow.
fn inverse_one_plus_exp(l: f64) -> f64 {
    if l > 0.0 {
        let e = (-l).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + l.exp())
    }
}

/// Exponent `(α/β)(α − β)` carried by the prior odds through two updates.
fn prior_exponent(alpha: f64, beta: f64) -> f64 {
    alpha / beta * (alpha - beta)
}

/// `r_{α,β}(p, q)`: the sender's second posterior at which the receiver, with
/// first posterior `q`, reaches belief ½.
pub fn interim_threshold(alpha: f64, beta: f64, p: f64, q: f64) -> Result<f64> {
    check_params(alpha, beta)?;
    check_open_unit("p", p)?;
    check_open_unit("q", q)?;
    let l = prior_exponent(alpha, beta) * logit(p) + (alpha - 1.0) * logit(q);
    Ok(inverse_one_plus_exp(l))
}

/// `q_{α,β}(p)`: the first posterior at which the receiver reaches belief ½.
pub fn outer_threshold(alpha: f64, beta: f64, p: f64) -> Result<f64> {
    check_params(alpha, beta)?;
    check_open_unit("p", p)?;
    Ok(inverse_one_plus_exp((alpha - beta) / beta * logit(p)))
}

/// `(v^II(p), sup 𝒱¹)`; both are 1 once `p ≥ ½`.
pub fn closed_form_values(alpha: f64, beta: f64, p: f64) -> Result<(f64, f64)> {
    check_params(alpha, beta)?;
    check_open_unit("p", p)?;
    if p >= 0.5 {
        return Ok((1.0, 1.0));
    }
    let l = logit(p);
    let two = p * (1.0 + ((alpha * alpha / beta - 1.0) * l).exp());
    let one = p * (1.0 + ((alpha / beta - 1.0) * l).exp());
    Ok((two, one))
}

/// Sign of `v^II(p) − sup 𝒱¹`, read from the exponents of the prior odds so
/// that differences far below double precision relative to `p` still register.
pub fn closed_form_gap_sign(alpha: f64, beta: f64, p: f64) -> Result<i8> {
    check_params(alpha, beta)?;
    check_open_unit("p", p)?;
    if p >= 0.5 {
        return Ok(0);
    }
    let l = logit(p);
    let gap = (alpha * alpha / beta - 1.0) * l - (alpha / beta - 1.0) * l;
    Ok(sign(gap, SIGN_TOLERANCE * l.abs()))
}

/// `ln K` with `K = (p/(1−p))^{(α/β)(α−β)}`.
fn log_k(alpha: f64, beta: f64, p: f64) -> f64 {
    prior_exponent(alpha, beta) * logit(p)
}

/// `f(q) = q + K q^α (1−q)^{1−α}`, equal to `v^II(q)` below the outer threshold.
pub fn f(alpha: f64, beta: f64, p: f64, q: f64) -> f64 {
    q + (log_k(alpha, beta, p) + alpha * q.ln() + (1.0 - alpha) * (-q).ln_1p()).exp()
}

/// `f'(q) = 1 + K q^{α−1} (1−q)^{−α} (α − q)`.
pub fn f_prime(alpha: f64, beta: f64, p: f64, q: f64) -> f64 {
    1.0 + (log_k(alpha, beta, p) + (alpha - 1.0) * q.ln() - alpha * (-q).ln_1p()).exp()
        * (alpha - q)
}

/// `f''(q) = K α (α − 1) q^{α−2} (1−q)^{−α−1}`, by direct differentiation.
pub fn f_second(alpha: f64, beta: f64, p: f64, q: f64) -> f64 {
    let mag = (log_k(alpha, beta, p) + (alpha - 2.0) * q.ln() - (alpha + 1.0) * (-q).ln_1p()).exp();
    alpha * (alpha - 1.0) * mag
}

/// The second-derivative expression with the opposite leading sign, as it is
/// sometimes displayed; kept so reports can show which one the numbers follow.
pub fn f_second_displayed(alpha: f64, beta: f64, p: f64, q: f64) -> f64 {
    -f_second(alpha, beta, p, q)
}

fn sign(x: f64, tol: f64) -> i8 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}

/// Sign of `v^II(p) − sup 𝒱¹` predicted by `α` alone.
pub fn expected_sign(alpha: f64) -> i8 {
    sign(1.0 - alpha, 0.0)
}

/// The three-way comparison of two-step against one-shot persuasion as claimed
/// for the α–β rule: strictly better for `α < 1`, indifferent at `α = 1`,
/// strictly worse for `α > 1`.
pub fn claimed_classification(alpha: f64) -> Classification {
    match expected_sign(alpha) {
        1 => Classification::Better,
        0 => Classification::Indifferent,
        _ => Classification::Worse,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvaturePoint {
    pub q: f64,
    pub second_difference: f64,
    pub analytic: f64,
}

/// Curvature of `f` on `(0, q*)` from centered second differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curvature {
    pub points: Vec<CurvaturePoint>,
    /// +1 convex, −1 concave, 0 flat or mixed.
    pub measured_sign: i8,
    pub analytic_sign: i8,
    pub displayed_sign: i8,
    /// Largest `|second difference − f''| / (1 + |f''|)`.
    pub max_relative_error: f64,
}

pub fn measure_curvature(alpha: f64, beta: f64, p: f64, upper: f64) -> Curvature {
    let n = CURVATURE_POINTS;
    let points: Vec<CurvaturePoint> = (1..=n)
        .map(|i| {
            let q = upper * i as f64 / (n + 1) as f64;
            let h = 1e-2 * q.min(upper - q);
            let fq = |x| f(alpha, beta, p, x);
            CurvaturePoint {
                q,
                second_difference: (fq(q + h) - 2.0 * fq(q) + fq(q - h)) / (h * h),
                analytic: f_second(alpha, beta, p, q),
            }
        })
        .collect();
    let signs: Vec<i8> = points
        .iter()
        .map(|c| sign(c.second_difference, 1e-6))
        .collect();
    let measured_sign = if signs.iter().all(|s| *s == signs[0]) {
        signs[0]
    } else {
        0
    };
    let max_relative_error = points
        .iter()
        .map(|c| (c.second_difference - c.analytic).abs() / (1.0 + c.analytic.abs()))
        .fold(0.0, f64::max);
    let mid = upper / 2.0;
    Curvature {
        points,
        measured_sign,
        analytic_sign: sign(f_second(alpha, beta, p, mid), 0.0),
        displayed_sign: sign(f_second_displayed(alpha, beta, p, mid), 0.0),
        max_relative_error,
    }
}

/// Closed forms, pipeline values and claim checks for one `(α, β, p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GretherReport {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub outer_threshold: f64,
    pub interim_threshold_at_prior: f64,
    /// `(q, r_{α,β}(p, q))` on a grid of interior `q`.
    pub interim_threshold_samples: Vec<(f64, f64)>,
    pub closed_form_interim_value: f64,
    pub closed_form_oneshot_value: f64,
    pub pipeline_interim_value: f64,
    pub pipeline_oneshot_value: f64,
    /// Outer envelope of `v^II` at the prior.
    pub two_step_value: f64,
    /// Largest gap between a closed form and its pipeline counterpart.
    pub max_pipeline_deviation: f64,
    pub interim_minus_oneshot: f64,
    pub sign: i8,
    pub expected_sign: i8,
    pub sign_concordant: bool,
    pub classification: Classification,
    pub claimed_classification: Classification,
    pub claim_concordant: bool,
    /// Whether the two-step value equals the chord value `p / q*` within the margin.
    pub two_step_on_chord: bool,
    pub curvature: Curvature,
}

pub fn comparison_report(
    alpha: f64,
    beta: f64,
    p: f64,
    opts: &SolverOptions,
) -> Result<GretherReport> {
    check_params(alpha, beta)?;
    if !(p > 0.0 && p < 0.5) {
        return Err(PersuasionError::DomainError(format!(
            "p = {p} outside (0, ½)"
        )));
    }
    let q_star = outer_threshold(alpha, beta, p)?;
    let r_pp = interim_threshold(alpha, beta, p, p)?;
    let interim_threshold_samples = (1..10)
        .map(|i| {
            let q = i as f64 / 10.0;
            interim_threshold(alpha, beta, p, q).map(|r| (q, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let (cf_two, cf_one) = closed_form_values(alpha, beta, p)?;

    let env = PersuasionEnvironment::judge_prosecutor(p)?;
    let rule = UpdatingRule::grether(alpha, beta)?;
    let pipeline_interim = interim_value(&env, &rule, env.prior(), env.prior(), opts)?.value;
    let pipeline_oneshot = solve_oneshot(&env, &rule, opts)?.value;
    let two_step = solve_twostep(&env, &rule, opts)?;

    let diff = cf_two - cf_one;
    let s = closed_form_gap_sign(alpha, beta, p)?;
    let claimed = claimed_classification(alpha);
    Ok(GretherReport {
        alpha,
        beta,
        p,
        outer_threshold: q_star,
        interim_threshold_at_prior: r_pp,
        interim_threshold_samples,
        closed_form_interim_value: cf_two,
        closed_form_oneshot_value: cf_one,
        pipeline_interim_value: pipeline_interim,
        pipeline_oneshot_value: pipeline_oneshot,
        two_step_value: two_step.two_step_value,
        max_pipeline_deviation: (cf_two - pipeline_interim)
            .abs()
            .max((cf_one - pipeline_oneshot).abs()),
        interim_minus_oneshot: diff,
        sign: s,
        expected_sign: expected_sign(alpha),
        sign_concordant: s == expected_sign(alpha),
        classification: two_step.classification,
        claimed_classification: claimed,
        claim_concordant: two_step.classification == claimed,
        two_step_on_chord: (two_step.two_step_value - p / q_star).abs()
            <= opts.classification_margin,
        curvature: measure_curvature(alpha, beta, p, q_star),
    })
}
