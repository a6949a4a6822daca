use persuade_core::harness::{run_suite, Suite};
use persuade_core::SolverOptions;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::report::RunReport;

pub fn suites(name: &str) -> Result<Vec<Suite>> {
    if name == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    name.parse::<Suite>()
        .map(|s| vec![s])
        .map_err(|_| CliError::Validation(format!("unknown suite {name:?}; expected one of transform, divisibility, grether, envelope, simulation, all")))
}

pub fn run(argv: Vec<String>, name: &str, seed: u64) -> Result<RunReport> {
    let suites = suites(name)?;
    let opts = SolverOptions::default();
    let mut report = RunReport::new(argv, json!({ "suite": name, "seed": seed, "solver": opts }));
    let mut summary = Vec::new();
    for suite in suites {
        let result = run_suite(suite, seed, &opts)?;
        let module = format!("harness::suites::{suite}");
        let mut max_deviation: f64 = 0.0;
        for c in &result.checks {
            report.check(
                format!("{suite}: {}", c.name),
                c.value,
                &module,
                c.tolerance,
                c.passed,
            );
            if c.value.is_finite() {
                max_deviation = max_deviation.max(c.value.abs());
            }
        }
        summary.push(json!({
            "suite": suite.name(),
            "checks": result.checks.len(),
            "failures": result.failures().count(),
            "max_value": max_deviation,
            "passed": result.passed,
        }));
    }
    report.details = json!({ "suites": summary });
    Ok(report)
}
