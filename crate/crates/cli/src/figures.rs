//! Data behind the five judge–prosecutor figures, linear receiver.
//!
//! 1. `v̌` and its envelope for each α; thresholds in the column names.
//! 2. The one-shot split ρ* and its halfway contraction ρ′.
//! 3. and 4. The second-stage utility and envelope at each atom of ρ′.
//! 5. One-shot, gradual two-step and optimal two-step values per α.

use std::path::Path;

use persuade_core::twostep::{
    gradual_first_stage, interim_value, second_stage_utility, TwoStepStrategy,
};
use persuade_core::{
    evaluate_strategy, solve_oneshot, solve_twostep, Belief, Classification, OneShotSolution,
    PersuasionEnvironment, PiecewiseUtility, PosteriorDistribution, SolverOptions, UpdatingRule,
};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::range::ParamRange;
use crate::report::RunReport;
use crate::series::{cell, grid, writer, Envelope};
use crate::solve::modified_piecewise;

pub fn default_alphas(id: u8) -> Vec<f64> {
    match id {
        1 => vec![0.5, 1.0, 1.5],
        2 | 3 => vec![0.5],
        4 => vec![1.5],
        _ => vec![0.5, 1.5],
    }
}

pub const FIGURE2_HEADER: [&str; 4] = ["alpha", "distribution", "belief", "weight"];
pub const INTERIM_HEADER: [&str; 7] = [
    "alpha",
    "atom",
    "atom_belief",
    "atom_weight",
    "r",
    "utility",
    "envelope",
];
pub const FIGURE5_HEADER: [&str; 6] = [
    "alpha",
    "one_shot",
    "gradual_two_step",
    "optimal_two_step",
    "gradual_minus_one_shot",
    "gradual_vs_one_shot",
];

/// Column names of figure 1 for one α with one-shot threshold `t`.
pub fn figure1_columns(alpha: f64, threshold: Option<f64>) -> [String; 2] {
    let t = threshold.map_or("none".to_string(), |t| format!("{t:.6}"));
    [
        format!("modified_a{alpha}_t{t}"),
        format!("envelope_a{alpha}_t{t}"),
    ]
}

struct Linear {
    alpha: f64,
    rule: UpdatingRule,
    oneshot: OneShotSolution,
    /// ρ′, when the one-shot split is not already the prior.
    gradual: Option<PosteriorDistribution>,
}

fn linear(env: &PersuasionEnvironment, alpha: f64, opts: &SolverOptions) -> Result<Linear> {
    let rule = UpdatingRule::linear(alpha)?;
    let oneshot = solve_oneshot(env, &rule, opts)?;
    let p = env.prior().high();
    let gradual = match oneshot.thresholds.first() {
        Some(&t) if t > p => Some(gradual_first_stage(t, p)?),
        _ => None,
    };
    Ok(Linear {
        alpha,
        rule,
        oneshot,
        gradual,
    })
}

pub fn run(
    argv: Vec<String>,
    out: &Path,
    id: u8,
    p: f64,
    alphas: Option<&ParamRange>,
    points: usize,
) -> Result<RunReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CliError::Validation(format!("prior {p} outside (0, 1)")));
    }
    if points < 2 {
        return Err(CliError::Validation("at least 2 grid points".into()));
    }
    let alphas = alphas.map_or_else(|| default_alphas(id), |a| a.values().to_vec());
    let env = PersuasionEnvironment::judge_prosecutor(p)?;
    let opts = SolverOptions::default();
    let mut report = RunReport::new(
        argv,
        json!({ "figure": id, "p": p, "alphas": alphas, "points": points, "rule": "linear", "solver": opts }),
    );
    let cases = alphas
        .iter()
        .map(|&a| linear(&env, a, &opts))
        .collect::<Result<Vec<_>>>()?;
    for c in &cases {
        report.value(
            format!("one_shot_value[alpha={}]", c.alpha),
            c.oneshot.value,
            "oneshot",
            1e-6,
        );
        if let Some(&t) = c.oneshot.thresholds.first() {
            report.value(format!("threshold[alpha={}]", c.alpha), t, "oneshot", 1e-12);
        }
    }
    let name = format!("figure{id}.csv");
    let (mut w, path) = writer(out, &name)?;
    match id {
        1 => {
            let mut header = vec!["q".to_string()];
            let mut series = Vec::new();
            for c in &cases {
                header.extend(figure1_columns(
                    c.alpha,
                    c.oneshot.thresholds.first().copied(),
                ));
                let u = modified_piecewise(&env, &c.rule, c.oneshot.thresholds.clone())?;
                let hull = Envelope::new(&u, opts.resolution);
                series.push((u, hull));
            }
            w.write_record(&header)?;
            for q in grid(points) {
                let mut row = vec![cell(q)];
                for (u, hull) in &series {
                    row.push(cell(u.eval(q)));
                    row.push(cell(hull.at(q)));
                }
                w.write_record(&row)?;
            }
        }
        2 => {
            w.write_record(FIGURE2_HEADER)?;
            for c in &cases {
                let mut dists = vec![("rho_star", &c.oneshot.distribution)];
                dists.extend(c.gradual.as_ref().map(|g| ("rho_prime", g)));
                for (label, d) in dists {
                    let mut atoms = d.binary_points();
                    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
                    for (q, wgt) in atoms {
                        w.write_record([cell(c.alpha), label.to_string(), cell(q), cell(wgt)])?;
                    }
                }
            }
        }
        3 | 4 => {
            w.write_record(INTERIM_HEADER)?;
            for c in &cases {
                let Some(gradual) = &c.gradual else {
                    continue;
                };
                let strategy =
                    TwoStepStrategy::with_optimal_second_stage(&env, &c.rule, gradual, &opts)?;
                report.value(
                    format!("gradual_two_step_value[alpha={}]", c.alpha),
                    evaluate_strategy(&env, &c.rule, &strategy)?,
                    "twostep::evaluate_strategy",
                    1e-9,
                );
                let mut atoms = gradual.atoms().to_vec();
                atoms.sort_by(|a, b| a.belief.high().total_cmp(&b.belief.high()));
                for (k, atom) in atoms.iter().enumerate() {
                    let (env2, rule2, first) = (env.clone(), c.rule.clone(), atom.belief.clone());
                    let solution = interim_value(&env, &c.rule, env.prior(), &first, &opts)?;
                    let u = PiecewiseUtility::new(move |r| {
                        Belief::binary(r)
                            .and_then(|b| {
                                second_stage_utility(&env2, &rule2, env2.prior(), &first, &b)
                            })
                            .unwrap_or(f64::NAN)
                    })
                    .with_breakpoints(
                        solution
                            .threshold
                            .into_iter()
                            .filter(|t| *t > 0.0 && *t < 1.0)
                            .collect(),
                    )?;
                    let hull = Envelope::new(&u, opts.inner_resolution);
                    report.value(
                        format!("interim_value[alpha={},atom={k}]", c.alpha),
                        solution.value,
                        "twostep",
                        1e-6,
                    );
                    for r in grid(points) {
                        w.write_record([
                            cell(c.alpha),
                            k.to_string(),
                            cell(atom.belief.high()),
                            cell(atom.weight),
                            cell(r),
                            cell(u.eval(r)),
                            cell(hull.at(r)),
                        ])?;
                    }
                }
            }
        }
        _ => {
            w.write_record(FIGURE5_HEADER)?;
            for c in &cases {
                let optimal = solve_twostep(&env, &c.rule, &opts)?;
                let gradual = match &c.gradual {
                    Some(g) => {
                        let s =
                            TwoStepStrategy::with_optimal_second_stage(&env, &c.rule, g, &opts)?;
                        evaluate_strategy(&env, &c.rule, &s)?
                    }
                    None => c.oneshot.value,
                };
                let diff = gradual - c.oneshot.value;
                let order =
                    Classification::compare(gradual, c.oneshot.value, opts.classification_margin);
                report.value(
                    format!("gradual_two_step_value[alpha={}]", c.alpha),
                    gradual,
                    "twostep::evaluate_strategy",
                    1e-9,
                );
                report.value(
                    format!("optimal_two_step_value[alpha={}]", c.alpha),
                    optimal.two_step_value,
                    "twostep",
                    1e-6,
                );
                w.write_record([
                    cell(c.alpha),
                    cell(c.oneshot.value),
                    cell(gradual),
                    cell(optimal.two_step_value),
                    format!("{diff:.9e}"),
                    order.as_str().to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    report.outputs.push(path.display().to_string());
    report.details = json!({
        "distributions": cases.iter().map(|c| json!({
            "alpha": c.alpha,
            "rho_star": c.oneshot.distribution,
            "rho_prime": c.gradual,
        })).collect::<Vec<_>>(),
    });
    Ok(report)
}
