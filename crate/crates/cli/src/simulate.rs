use std::path::Path;

use persuade_core::harness::{simulate, SimConfig, SimStrategy};
use persuade_core::oneshot::modified_utility;
use persuade_core::{evaluate_strategy, solve_oneshot, solve_twostep, splitting_experiment};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::report::RunReport;
use crate::scenario::Scenario;
use crate::Mode;

/// Simulated and analytic values must agree within this many standard errors.
pub const STANDARD_ERRORS: f64 = 3.0;

pub fn run(
    argv: Vec<String>,
    path: &Path,
    mode: Mode,
    reps: Option<u64>,
    seed: Option<u64>,
    paths: Option<usize>,
) -> Result<RunReport> {
    let mut scenario = Scenario::load(path)?;
    let sim = &mut scenario.file.simulation;
    sim.replications = reps.unwrap_or(sim.replications);
    sim.seed = seed.unwrap_or(sim.seed);
    sim.log_paths = paths.unwrap_or(sim.log_paths);
    if sim.replications == 0 {
        return Err(CliError::Validation("replications must be positive".into()));
    }
    let sim = sim.clone();
    let (env, rule, opts) = (&scenario.env, scenario.rule(), scenario.options());
    let explicit = scenario.file.strategy.clone();

    let (strategy, analytic, source) = match (mode, &explicit) {
        (Mode::Oneshot, Some(spec)) => {
            if spec.second.is_some() {
                return Err(CliError::Validation(
                    "scenario strategy has two stages; use --mode twostep".into(),
                ));
            }
            let first = scenario.first_stage(spec)?;
            let value = first.expect(|b| modified_utility(env, rule, env.prior(), b))?;
            (
                SimStrategy::OneShot(splitting_experiment(&first, env.prior())?),
                value,
                "scenario",
            )
        }
        (Mode::Oneshot, None) => {
            let sol = solve_oneshot(env, rule, opts)?;
            (SimStrategy::OneShot(sol.experiment), sol.value, "oneshot")
        }
        (Mode::Twostep, Some(spec)) => {
            let strategy = scenario.strategy(spec)?.ok_or_else(|| {
                CliError::Validation("scenario strategy has no second stage".into())
            })?;
            let value = evaluate_strategy(env, rule, &strategy)?;
            (
                SimStrategy::from_two_step(env.prior(), &strategy)?,
                value,
                "scenario",
            )
        }
        (Mode::Twostep, None) => {
            let sol = solve_twostep(env, rule, opts)?;
            let strategy = sol.strategy(env.prior())?;
            let value = evaluate_strategy(env, rule, &strategy)?;
            (
                SimStrategy::from_two_step(env.prior(), &strategy)?,
                value,
                "twostep",
            )
        }
    };

    let config = SimConfig {
        replications: sim.replications,
        seed: sim.seed,
        env: env.clone(),
        rule: rule.clone(),
        strategy,
        log_paths: sim.log_paths,
    };
    let result = simulate(&config)?;

    let mut report = RunReport::new(
        argv,
        json!({
            "scenario_file": path.display().to_string(),
            "scenario": scenario.file,
            "mode": mode,
            "strategy_source": source,
            "strategy": config.strategy,
        }),
    );
    let tolerance = STANDARD_ERRORS * result.standard_error;
    let module = match mode {
        Mode::Oneshot => "oneshot",
        Mode::Twostep => "twostep::evaluate_strategy",
    };
    report.value("analytic_value", analytic, module, 1e-9);
    report.value("simulated_mean", result.mean, "harness::sim", tolerance);
    report.value("standard_error", result.standard_error, "harness::sim", 0.0);
    // a zero-variance run must match exactly up to rounding
    report.oracle(
        "simulated_vs_analytic",
        (result.mean - analytic).abs(),
        "harness::sim",
        tolerance.max(1e-12),
    );
    report.details = serde_json::to_value(&result)?;
    Ok(report)
}
