use std::fs;
use std::path::{Path, PathBuf};

use ahnls::weyl::{Component, CoverPoint, SphereValue};
use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;
use crate::report::SuiteReport;
use crate::scan::ScanRow;

pub const REPORT_HEADER: [&str; 19] = [
    "case_id",
    "suite",
    "potential",
    "invariant",
    "q_re",
    "q_im",
    "q_sheet",
    "p_re",
    "p_im",
    "p_sheet",
    "value_re",
    "value_im",
    "predicted_re",
    "predicted_im",
    "abs_error",
    "rel_error",
    "budget",
    "pass",
    "detail",
];

pub const SCAN_HEADER: [&str; 13] = [
    "index",
    "lambda_re",
    "lambda_im",
    "sheet",
    "component",
    "value_re",
    "value_im",
    "reciprocal",
    "pole",
    "method",
    "truncation_radius",
    "error_estimate",
    "flag",
];

/// Decimal with 17 significant digits.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn point_fields(q: &Option<CoverPoint>) -> [String; 3] {
    match q {
        Some(q) => [float(q.lambda().re), float(q.lambda().im), q.sheet().symbol().to_string()],
        None => [String::new(), String::new(), String::new()],
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.into(), source }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let source = match e.into_kind() {
        csv::ErrorKind::Io(err) => err,
        other => std::io::Error::other(format!("{other:?}")),
    };
    CliError::Io { path: path.into(), source }
}

fn write_csv(path: &Path, header: &[&str], records: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in records {
        w.write_record(&r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(io(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io(path))
}

#[derive(Serialize)]
struct JsonPoint {
    re: f64,
    im: f64,
    sheet: String,
}

impl JsonPoint {
    fn from(q: &Option<CoverPoint>) -> Option<Self> {
        q.map(|q| Self { re: q.lambda().re, im: q.lambda().im, sheet: q.sheet().symbol().to_string() })
    }
}

#[derive(Serialize)]
struct JsonRow {
    case_id: usize,
    invariant: &'static str,
    q: Option<JsonPoint>,
    p: Option<JsonPoint>,
    value: [f64; 2],
    predicted: [f64; 2],
    abs_error: f64,
    rel_error: f64,
    budget: f64,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct JsonSummary {
    suite: String,
    potential: String,
    passed: bool,
    cases: usize,
    passes: usize,
    max_abs_residual: f64,
    max_rel_residual: f64,
}

impl JsonSummary {
    fn of(r: &SuiteReport) -> Self {
        Self {
            suite: r.suite.name().into(),
            potential: r.potential_id.clone(),
            passed: r.passed(),
            cases: r.cases,
            passes: r.passes,
            max_abs_residual: r.max_abs_residual,
            max_rel_residual: r.max_rel_residual,
        }
    }
}

#[derive(Serialize)]
struct JsonReport {
    #[serde(flatten)]
    summary: JsonSummary,
    rows: Vec<JsonRow>,
}

/// Writes `<suite>.csv` and/or `<suite>.json` into `dir`.
pub fn emit_report(report: &SuiteReport, format: Format, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    if format.csv() {
        let path = dir.join(format!("{}.csv", report.suite.name()));
        let records = report.rows.iter().map(|r| {
            let mut rec = vec![
                r.case_id.to_string(),
                report.suite.name().into(),
                report.potential_id.clone(),
                r.invariant.into(),
            ];
            rec.extend(point_fields(&r.q));
            rec.extend(point_fields(&r.p));
            rec.extend(
                [r.value.re, r.value.im, r.predicted.re, r.predicted.im, r.abs_error, r.rel_error, r.budget].map(float),
            );
            rec.push(if r.pass { "pass" } else { "fail" }.into());
            rec.push(r.detail.clone());
            rec
        });
        write_csv(&path, &REPORT_HEADER, records)?;
        written.push(path);
    }
    if format.json() {
        let path = dir.join(format!("{}.json", report.suite.name()));
        let rows = report
            .rows
            .iter()
            .map(|r| JsonRow {
                case_id: r.case_id,
                invariant: r.invariant,
                q: JsonPoint::from(&r.q),
                p: JsonPoint::from(&r.p),
                value: [r.value.re, r.value.im],
                predicted: [r.predicted.re, r.predicted.im],
                abs_error: r.abs_error,
                rel_error: r.rel_error,
                budget: r.budget,
                pass: r.pass,
                detail: r.detail.clone(),
            })
            .collect();
        write_json(&path, &JsonReport { summary: JsonSummary::of(report), rows })?;
        written.push(path);
    }
    Ok(written)
}

/// Writes `summary.json` with one verdict per suite.
pub fn emit_summary(reports: &[SuiteReport], dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    #[derive(Serialize)]
    struct Summary {
        passed: bool,
        suites: Vec<JsonSummary>,
    }
    let path = dir.join("summary.json");
    let summary =
        Summary { passed: reports.iter().all(|r| r.passed()), suites: reports.iter().map(JsonSummary::of).collect() };
    write_json(&path, &summary)?;
    Ok(path)
}

fn component_name(c: Option<Component>) -> &'static str {
    match c {
        Some(Component::R) => "R",
        Some(Component::L) => "L",
        None => "",
    }
}

/// `(re, im, reciprocal, pole)`: the stored chart coordinate of the value.
fn value_fields(v: &Option<SphereValue>) -> (f64, f64, bool, bool) {
    match v {
        Some(SphereValue::Finite(x)) => (x.re, x.im, false, false),
        Some(w @ SphereValue::Reciprocal(r)) => (r.re, r.im, true, w.is_pole()),
        None => (f64::NAN, f64::NAN, false, false),
    }
}

#[derive(Serialize)]
struct JsonScanRow {
    index: usize,
    lambda: [f64; 2],
    sheet: String,
    component: &'static str,
    value: [f64; 2],
    reciprocal: bool,
    pole: bool,
    method: Option<&'static str>,
    truncation_radius: f64,
    error_estimate: f64,
    flag: String,
}

/// Writes `scan.csv` and/or `scan.json` into `dir`.
pub fn emit_scan(rows: &[ScanRow], format: Format, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    if format.csv() {
        let path = dir.join("scan.csv");
        let records = rows.iter().map(|r| {
            let (re, im, reciprocal, pole) = value_fields(&r.value);
            vec![
                r.index.to_string(),
                float(r.lambda.re),
                float(r.lambda.im),
                r.sheet.symbol().to_string(),
                component_name(r.component).into(),
                float(re),
                float(im),
                u8::from(reciprocal).to_string(),
                u8::from(pole).to_string(),
                r.method.map_or("", |m| m.name()).into(),
                float(r.truncation_radius),
                float(r.error_estimate),
                r.flag.clone(),
            ]
        });
        write_csv(&path, &SCAN_HEADER, records)?;
        written.push(path);
    }
    if format.json() {
        let path = dir.join("scan.json");
        let out: Vec<JsonScanRow> = rows
            .iter()
            .map(|r| {
                let (re, im, reciprocal, pole) = value_fields(&r.value);
                JsonScanRow {
                    index: r.index,
                    lambda: [r.lambda.re, r.lambda.im],
                    sheet: r.sheet.symbol().to_string(),
                    component: component_name(r.component),
                    value: [re, im],
                    reciprocal,
                    pole,
                    method: r.method.map(|m| m.name()),
                    truncation_radius: r.truncation_radius,
                    error_estimate: r.error_estimate,
                    flag: r.flag.clone(),
                }
            })
            .collect();
        write_json(&path, &out)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;
    use crate::report::CaseRow;
    use std::time::Duration;

    #[test]
    fn seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(float(f64::INFINITY), "inf");
    }

    #[test]
    fn empty_inputs_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        emit_scan(&[], Format::Csv, dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
        assert_eq!(text, SCAN_HEADER.join(",") + "\n");
        let r = SuiteReport::new(Suite::Reality, "zero".into(), vec![], Duration::ZERO);
        let files = emit_report(&r, Format::Both, dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let text = fs::read_to_string(dir.path().join("reality.csv")).unwrap();
        assert_eq!(text, REPORT_HEADER.join(",") + "\n");
    }

    #[test]
    fn detail_with_commas_is_quoted() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![CaseRow::bound("x", 0.5, 1.0).detail("a, b")];
        let r = SuiteReport::new(Suite::Reality, "zero".into(), rows, Duration::from_secs(3));
        emit_report(&r, Format::Csv, dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("reality.csv")).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",pass,\"a, b\""));
    }
}
