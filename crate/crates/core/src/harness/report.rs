//! CSV and JSON reports.
//!
//! CSV: one header line ([`CSV_COLUMNS`]) then one row per `(cell, trial)`
//! in cell order, trials ascending. Absent optional values are empty
//! fields, booleans are `true`/`false`.
//!
//! JSON: `{"config": …, "records": [...], "aggregate": {"passed", "cells",
//! "counterexamples", "observations", "sequences"}}`.

use std::path::Path;

use serde::Serialize;

use super::config::{CampaignConfig, ReportFormat};
use super::{CampaignResult, CellSummary, Counterexample, Observation, RatioSequence, TrialRecord};
use crate::error::Result;

pub const CSV_COLUMNS: &[&str] = &[
    "cell",
    "trial",
    "q",
    "d",
    "k",
    "target_size",
    "seed",
    "set_size",
    "direction_count",
    "ambient_directions",
    "diff_size",
    "bound_ii",
    "bound_iii",
    "bound_diff",
    "ratio_ii",
    "ratio_iii",
    "ratio_diff",
    "salem_constant",
    "salem_at_threshold",
    "full_coverage",
    "quotient_bound_holds",
    "mu_identities_hold",
    "fourth_moment_defect",
    "first_coordinate_pairs",
    "above_threshold",
    "nu_lower_bound",
    "min_nu",
    "nu_all_positive",
    "slope_coverage",
    "min_remainder",
    "literal_subset_holds",
    "hard_failures",
];

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a CampaignConfig,
    records: &'a [TrialRecord],
    aggregate: Aggregate<'a>,
}

#[derive(Serialize)]
struct Aggregate<'a> {
    passed: bool,
    cells: &'a [CellSummary],
    counterexamples: &'a [Counterexample],
    observations: &'a [Observation],
    sequences: &'a [RatioSequence],
}

pub fn render_report(result: &CampaignResult, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_COLUMNS)?;
            for r in &result.records {
                w.serialize(r)?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        ReportFormat::Json => {
            let report = JsonReport {
                config: &result.config,
                records: &result.records,
                aggregate: Aggregate {
                    passed: result.passed(),
                    cells: &result.cells,
                    counterexamples: &result.counterexamples,
                    observations: &result.observations,
                    sequences: &result.sequences,
                },
            };
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            Ok(text)
        }
    }
}

/// Renders the whole report before touching `path`.
pub fn emit_report(result: &CampaignResult, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let text = render_report(result, format)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// `%g` with six significant digits.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
