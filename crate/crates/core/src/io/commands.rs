use std::fs;
use std::path::Path;

use super::manifest::write_atomic;
use super::series_csv::read_series;
use super::svg::{loglog_chart, Line};
use crate::criteria::{
    global_report, local_report, synthetic_profile, zero_profile, CriterionReport, ReportOptions,
    SyntheticOptions, SyntheticReport,
};
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
/// A theorem-backed inequality failed beyond its certified error.
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Clone, Debug, Default)]
pub struct DiagnoseArgs {
    pub ball: Option<usize>,
    pub window: Option<(f64, f64)>,
    pub t_ref: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct DiagnoseOutcome {
    pub report: CriterionReport,
    pub exit_code: i32,
}

pub fn diagnose_series(series: &crate::criteria::NormSeries, args: &DiagnoseArgs) -> Result<DiagnoseOutcome> {
    let opts = ReportOptions {
        window: args.window,
        t_ref: args.t_ref,
        ..ReportOptions::default()
    };
    let report = match args.ball {
        Some(b) => local_report(series, b, &opts)?,
        None => global_report(series, &opts)?,
    };
    let exit_code = if report.violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok(DiagnoseOutcome { report, exit_code })
}

pub fn cmd_diagnose(series_csv: &Path, args: &DiagnoseArgs) -> Result<DiagnoseOutcome> {
    let series = read_series(fs::File::open(series_csv)?)?;
    diagnose_series(&series, args)
}

#[derive(Clone, Debug)]
pub struct SyntheticArgs {
    pub eta: f64,
    pub t0: f64,
    pub t_end: f64,
    /// Largest cut; defaults to 1% of the window.
    pub eps_cut: Option<f64>,
    pub options: SyntheticOptions,
}

pub fn cmd_synthetic(args: &SyntheticArgs, svg: Option<&Path>) -> Result<SyntheticReport> {
    let eps = args.eps_cut.unwrap_or(1e-2 * (args.t_end - args.t0));
    let report = if args.eta == 0.0 {
        zero_profile(args.t0, args.t_end, eps, args.options)?
    } else {
        synthetic_profile(args.eta, args.t0, args.t_end, eps, args.options)?
    };
    if let Some(path) = svg {
        write_atomic(path, synthetic_svg(&report).as_bytes())?;
    }
    Ok(report)
}

pub fn synthetic_svg(report: &SyntheticReport) -> String {
    let mut lines = vec![Line {
        label: "nested functional F".into(),
        points: report
            .cuts
            .iter()
            .map(|c| (c.eps_cut, c.nested.reduced.value))
            .collect(),
        color: "#1f4e9c",
        dashed: false,
    }];
    if report.cuts.iter().all(|c| c.chain.is_some()) {
        lines.push(Line {
            label: "final bound line".into(),
            points: report
                .cuts
                .iter()
                .map(|c| (c.eps_cut, c.chain.expect("checked").final_bound.value))
                .collect(),
            color: "#b2401f",
            dashed: false,
        });
    }
    if let Some(limit) = report.bound_limit {
        let xs: Vec<f64> = report.cuts.iter().map(|c| c.eps_cut).collect();
        let (lo, hi) = (
            xs.iter().copied().fold(f64::INFINITY, f64::min),
            xs.iter().copied().fold(0.0, f64::max),
        );
        lines.push(Line {
            label: "(T-t0)/(1-eta)".into(),
            points: vec![(lo, limit), (hi, limit)],
            color: "#555555",
            dashed: true,
        });
    }
    loglog_chart(
        &format!("eta = {}", report.eta),
        "eps_cut",
        "value",
        &lines,
    )
}

pub fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(Error::from)
}
