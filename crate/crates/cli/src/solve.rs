use std::path::Path;

use persuade_core::grether::closed_form_values;
use persuade_core::harness::{brute_force_cav, receiver_coordinate_interim};
use persuade_core::oneshot::{modified_utility, StepUtility, GRID_CROSS_CHECK};
use persuade_core::twostep::interim_value;
use persuade_core::{
    solve_oneshot, solve_twostep, Belief, PersuasionEnvironment, PiecewiseUtility, SolverOptions,
    UpdatingRule,
};
use serde_json::json;

use crate::error::Result;
use crate::report::RunReport;
use crate::scenario::Scenario;
use crate::series::{cell, grid, writer, Envelope};
use crate::Mode;

/// Exhaustive-pair envelope resolution for the one-shot cross-check.
const BRUTE_FORCE_RESOLUTION: usize = 2001;
/// Receiver-coordinate interim resolution and its allowed gap.
const RECEIVER_COORDINATE_RESOLUTION: usize = 4001;
const RECEIVER_COORDINATE_TOLERANCE: f64 = 1e-4;
/// Agreement required of a closed form and the envelope pipeline.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-6;

/// `v̌(q)` as a piecewise utility with its jump points declared.
pub fn modified_piecewise(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    breakpoints: Vec<f64>,
) -> Result<PiecewiseUtility> {
    let (env, rule) = (env.clone(), rule.clone());
    Ok(PiecewiseUtility::new(move |q| {
        Belief::binary(q)
            .and_then(|b| modified_utility(&env, &rule, env.prior(), &b))
            .unwrap_or(f64::NAN)
    })
    .with_breakpoints(breakpoints)?)
}

/// `v^II(q)` as a piecewise utility with its kinks declared.
pub fn interim_piecewise(
    env: &PersuasionEnvironment,
    rule: &UpdatingRule,
    opts: &SolverOptions,
    breakpoints: Vec<f64>,
) -> Result<PiecewiseUtility> {
    let (env, rule, opts) = (env.clone(), rule.clone(), opts.clone());
    Ok(PiecewiseUtility::new(move |q| {
        Belief::binary(q)
            .and_then(|b| interim_value(&env, &rule, env.prior(), &b, &opts))
            .map_or(f64::NAN, |s| s.value)
    })
    .with_breakpoints(breakpoints)?)
}

/// The judge–prosecutor shape: a single switch at ½ from payoff 0 to 1.
fn judge_prosecutor_like(env: &PersuasionEnvironment) -> bool {
    StepUtility::detect(env).is_some_and(|s| s.switch == 0.5 && s.low == 0.0 && s.high == 1.0)
}

/// `(α, β)` of a rule in the α–β family.
pub fn alpha_beta(rule: &UpdatingRule) -> Option<(f64, f64)> {
    match *rule {
        UpdatingRule::Grether { alpha, beta } => Some((alpha, beta)),
        UpdatingRule::BaseRate { alpha } => Some((alpha, 1.0)),
        UpdatingRule::Bayesian => Some((1.0, 1.0)),
        _ => None,
    }
}

/// One-shot value against a linear receiver with a single switch, from the
/// posterior at which the distorted belief reaches the switch.
fn linear_closed_form(alpha: f64, p: f64, step: &StepUtility) -> f64 {
    let cutoff = (step.switch - (1.0 - alpha) * p) / alpha;
    let share = if cutoff <= p {
        1.0
    } else if cutoff > 1.0 {
        0.0
    } else {
        p / cutoff
    };
    step.low + (step.high - step.low) * share
}

pub fn run(
    argv: Vec<String>,
    path: &Path,
    mode: Mode,
    csv: Option<(&Path, usize)>,
) -> Result<RunReport> {
    let scenario = Scenario::load(path)?;
    let config = json!({
        "scenario_file": path.display().to_string(),
        "scenario": scenario.file,
        "mode": mode,
        "csv_points": csv.map(|c| c.1),
    });
    let mut report = RunReport::new(argv, config);
    match mode {
        Mode::Oneshot => oneshot(&scenario, &mut report, csv)?,
        Mode::Twostep => twostep(&scenario, &mut report, csv)?,
    }
    Ok(report)
}

fn oneshot(scenario: &Scenario, report: &mut RunReport, csv: Option<(&Path, usize)>) -> Result<()> {
    let (env, rule, opts) = (&scenario.env, scenario.rule(), scenario.options());
    let p = env.prior().high();
    let sol = solve_oneshot(env, rule, opts)?;
    report.value("one_shot_value", sol.value, "oneshot", GRID_CROSS_CHECK);
    if let Some(g) = sol.grid_value {
        report.value("one_shot_grid_value", g, "envelope", GRID_CROSS_CHECK);
        report.oracle(
            "threshold_vs_grid",
            (sol.value - g).abs(),
            "oneshot",
            GRID_CROSS_CHECK,
        );
    }

    let utility = modified_piecewise(env, rule, sol.thresholds.clone())?;
    let brute = brute_force_cav(
        |q| utility.eval(q),
        &sol.thresholds,
        env.prior(),
        BRUTE_FORCE_RESOLUTION,
    )?;
    report.oracle(
        "exhaustive_pair_envelope",
        (sol.value - brute).abs(),
        "harness::oracle",
        GRID_CROSS_CHECK,
    );

    if let (UpdatingRule::Linear { alpha }, Some(step)) = (rule, StepUtility::detect(env)) {
        let cf = linear_closed_form(*alpha, p, &step);
        report.value("closed_form_one_shot_value", cf, "rules", 1e-12);
        report.oracle(
            "closed_form_one_shot",
            (sol.value - cf).abs(),
            "oneshot",
            1e-9,
        );
    }
    if let (Some((a, b)), true) = (alpha_beta(rule), judge_prosecutor_like(env)) {
        let (_, cf) = closed_form_values(a, b, p)?;
        report.value("closed_form_one_shot_value", cf, "grether", 1e-12);
        report.oracle(
            "closed_form_one_shot",
            (sol.value - cf).abs(),
            "grether",
            CLOSED_FORM_TOLERANCE,
        );
    }
    report.details = json!({
        "distribution": sol.distribution,
        "experiment": sol.experiment,
        "thresholds": sol.thresholds,
        "method": sol.method,
    });

    if let Some((dir, points)) = csv {
        let env_hull = Envelope::new(&utility, opts.resolution);
        let (mut w, path) = writer(dir, "oneshot_utility.csv")?;
        w.write_record(["q", "modified_utility", "envelope"])?;
        for q in grid(points) {
            w.write_record([cell(q), cell(utility.eval(q)), cell(env_hull.at(q))])?;
        }
        w.flush().map_err(|e| crate::CliError::io(&path, e))?;
        report.outputs.push(path.display().to_string());
    }
    Ok(())
}

fn twostep(scenario: &Scenario, report: &mut RunReport, csv: Option<(&Path, usize)>) -> Result<()> {
    let (env, rule, opts) = (&scenario.env, scenario.rule(), scenario.options());
    let p = env.prior().high();
    let sol = solve_twostep(env, rule, opts)?;
    report.value(
        "two_step_value",
        sol.two_step_value,
        "twostep",
        GRID_CROSS_CHECK,
    );
    report.value("value", sol.value, "twostep", GRID_CROSS_CHECK);
    report.value(
        "one_shot_value",
        sol.oneshot.value,
        "oneshot",
        GRID_CROSS_CHECK,
    );
    report.value("classification_margin", sol.margin, "twostep", 0.0);
    report.classification = Some(sol.classification.as_str().to_string());

    for (k, atom) in sol.interim.iter().enumerate() {
        let q = atom.atom.belief.high();
        let other = receiver_coordinate_interim(env, rule, q, RECEIVER_COORDINATE_RESOLUTION)?;
        report.oracle(
            format!("interim_value_receiver_coordinates[{k}]"),
            (atom.solution.value - other).abs(),
            "harness::oracle",
            RECEIVER_COORDINATE_TOLERANCE,
        );
    }

    if let (Some((a, b)), true) = (alpha_beta(rule), judge_prosecutor_like(env)) {
        let (cf_two, cf_one) = closed_form_values(a, b, p)?;
        let at_prior = interim_value(env, rule, env.prior(), env.prior(), opts)?.value;
        report.value(
            "closed_form_interim_value_at_prior",
            cf_two,
            "grether",
            1e-12,
        );
        report.value("closed_form_one_shot_value", cf_one, "grether", 1e-12);
        report.value(
            "interim_value_at_prior",
            at_prior,
            "twostep",
            GRID_CROSS_CHECK,
        );
        report.oracle(
            "closed_form_interim_value",
            (at_prior - cf_two).abs(),
            "grether",
            CLOSED_FORM_TOLERANCE,
        );
        report.oracle(
            "closed_form_one_shot",
            (sol.oneshot.value - cf_one).abs(),
            "grether",
            CLOSED_FORM_TOLERANCE,
        );
    }
    report.details = json!({
        "first_stage": sol.first_stage,
        "interim": sol.interim,
        "one_shot_distribution": sol.oneshot.distribution,
        "breakpoints": sol.breakpoints,
        "skipped_second": sol.skipped_second,
    });

    if let Some((dir, points)) = csv {
        let interim = interim_piecewise(env, rule, opts, sol.breakpoints.clone())?;
        let hull = Envelope::new(&interim, opts.resolution);
        let modified = modified_piecewise(env, rule, sol.oneshot.thresholds.clone())?;
        let (mut w, path) = writer(dir, "twostep_utility.csv")?;
        w.write_record(["q", "interim_value", "envelope", "modified_utility"])?;
        for q in grid(points) {
            w.write_record([
                cell(q),
                cell(interim.eval(q)),
                cell(hull.at(q)),
                cell(modified.eval(q)),
            ])?;
        }
        w.flush().map_err(|e| crate::CliError::io(&path, e))?;
        report.outputs.push(path.display().to_string());
    }
    Ok(())
}
