//! The α–β comparison over a parameter grid, one CSV row per `(α, β, p)`.

use std::path::Path;

use persuade_core::grether::comparison_report;
use persuade_core::{PersuasionError, SolverOptions};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::range::ParamRange;
use crate::report::RunReport;
use crate::series::{cell, writer};
use crate::Family;

/// Column layout, version 1. Rows are ordered by α, then β, then p.
pub const HEADER: [&str; 21] = [
    "alpha",
    "beta",
    "p",
    "outer_threshold",
    "interim_threshold_at_prior",
    "closed_form_interim_value",
    "closed_form_one_shot_value",
    "pipeline_interim_value",
    "pipeline_one_shot_value",
    "two_step_value",
    "max_pipeline_deviation",
    "sign",
    "expected_sign",
    "sign_concordant",
    "classification",
    "claimed_classification",
    "claim_concordant",
    "curvature_measured_sign",
    "curvature_analytic_sign",
    "curvature_displayed_sign",
    "note",
];

pub const TRIVIAL_NOTE: &str = "trivial branch, both values 1";

fn annotated(alpha: f64, beta: f64, p: f64, fill: Option<&str>, note: &str) -> Vec<String> {
    let mut row = vec![cell(alpha), cell(beta), cell(p)];
    row.extend(std::iter::repeat_n(String::new(), HEADER.len() - 4));
    if let Some(v) = fill {
        // both closed-form values
        row[5] = v.into();
        row[6] = v.into();
    }
    row.push(note.into());
    row
}

pub fn run(
    argv: Vec<String>,
    out: &Path,
    alphas: &ParamRange,
    betas: &ParamRange,
    ps: &ParamRange,
    family: Family,
    name: &str,
) -> Result<RunReport> {
    if name.contains(std::path::MAIN_SEPARATOR) || name.is_empty() {
        return Err(CliError::Validation(format!(
            "output name {name:?} must be a plain file name"
        )));
    }
    let betas: Vec<f64> = match family {
        Family::Grether => betas.values().to_vec(),
        Family::BaseRate => vec![1.0],
    };
    let opts = SolverOptions::default();
    let mut report = RunReport::new(
        argv,
        json!({
            "alphas": alphas.values(),
            "betas": betas,
            "ps": ps.values(),
            "family": family,
            "solver": opts,
        }),
    );
    let (mut w, path) = writer(out, name)?;
    w.write_record(HEADER)?;
    let (mut rows, mut skipped, mut trivial, mut discordant) = (0usize, 0usize, 0usize, 0usize);
    let mut max_deviation: f64 = 0.0;
    for &alpha in alphas.values() {
        for &beta in &betas {
            for &p in ps.values() {
                rows += 1;
                if (0.5..1.0).contains(&p) && alpha > 0.0 && beta > 0.0 {
                    trivial += 1;
                    w.write_record(annotated(alpha, beta, p, Some(&cell(1.0)), TRIVIAL_NOTE))?;
                    continue;
                }
                let r = match comparison_report(alpha, beta, p, &opts) {
                    Ok(r) => r,
                    Err(e @ PersuasionError::DomainError(_)) => {
                        skipped += 1;
                        w.write_record(annotated(alpha, beta, p, None, &format!("skipped: {e}")))?;
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                max_deviation = max_deviation.max(r.max_pipeline_deviation);
                discordant += usize::from(!r.sign_concordant);
                w.write_record([
                    cell(alpha),
                    cell(beta),
                    cell(p),
                    cell(r.outer_threshold),
                    cell(r.interim_threshold_at_prior),
                    cell(r.closed_form_interim_value),
                    cell(r.closed_form_oneshot_value),
                    cell(r.pipeline_interim_value),
                    cell(r.pipeline_oneshot_value),
                    cell(r.two_step_value),
                    format!("{:.3e}", r.max_pipeline_deviation),
                    r.sign.to_string(),
                    r.expected_sign.to_string(),
                    r.sign_concordant.to_string(),
                    r.classification.as_str().into(),
                    r.claimed_classification.as_str().into(),
                    r.claim_concordant.to_string(),
                    r.curvature.measured_sign.to_string(),
                    r.curvature.analytic_sign.to_string(),
                    r.curvature.displayed_sign.to_string(),
                    String::new(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    report.outputs.push(path.display().to_string());
    report.value("rows", rows as f64, "cli::sweep", 0.0);
    report.value("trivial_rows", trivial as f64, "cli::sweep", 0.0);
    report.value("skipped_rows", skipped as f64, "cli::sweep", 0.0);
    report.value("sign_discordant_rows", discordant as f64, "grether", 0.0);
    report.oracle(
        "max_pipeline_deviation",
        max_deviation,
        "grether",
        crate::solve::CLOSED_FORM_TOLERANCE,
    );
    Ok(report)
}
