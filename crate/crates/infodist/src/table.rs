//! CSV tables for the reports. Floats use Rust's shortest round-trip
//! formatting; missing values are empty cells.

use anyhow::Result;
use infodist_core::harness::{StabilityReport, SuiteReport};

use crate::experiments::{CounterexampleReport, InvertReport, MetricReport, SandwichRun};

pub const DISTANCES_COLUMNS: &[&str] = &["metric", "sigma", "value", "path_a", "path_b", "clamped_mass", "x0", "h", "n", "pass"];
pub const PAIR_COLUMNS: &[&str] = &[
    "case", "sigma", "epsilon", "d_x", "d_y", "d_sum", "jst_x", "jst_y", "jst_sum", "hypothesis", "c_entropy",
    "c_fisher", "always_true_pass", "invalid",
];
pub const COUNTEREXAMPLE_COLUMNS: &[&str] = &["sigma", "T", "D", "T2D", "D_diff", "J_st", "c_D", "c_J"];
pub const SANDWICH_COLUMNS: &[&str] = &["re_t", "im_t", "ratio"];
pub const INVERT_COLUMNS: &[&str] =
    &["sigma", "x", "saddle", "fft", "rel_diff", "derivative", "finite_difference", "derivative_diff"];

/// Column list shown in `--help`.
pub fn help_text() -> String {
    let line = |name: &str, cols: &[&str]| format!("  {name:<15}{}\n", cols.join(","));
    let mut s = String::from("CSV columns (--format csv):\n");
    s += &line("distances", DISTANCES_COLUMNS);
    s += &line("pair, suite", PAIR_COLUMNS);
    s += &line("counterexample", COUNTEREXAMPLE_COLUMNS);
    s += &line("sandwich", SANDWICH_COLUMNS);
    s += &line("invert", INVERT_COLUMNS);
    s
}

fn num(v: f64) -> String {
    if v != 0.0 && !(1e-3..1e15).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn write(columns: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn distances(reports: &[MetricReport]) -> Result<String> {
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.metric.to_string(),
                num(r.sigma),
                num(r.value),
                opt(r.paths.map(|p| p.a)),
                opt(r.paths.map(|p| p.b)),
                num(r.clamped_mass),
                num(r.grid.x0),
                num(r.grid.h),
                r.grid.n.to_string(),
                r.pass.to_string(),
            ]
        })
        .collect();
    write(DISTANCES_COLUMNS, rows)
}

fn pair_row(case: usize, r: &StabilityReport) -> Vec<String> {
    let d = &r.distances;
    vec![
        case.to_string(),
        num(r.sigma),
        num(r.epsilon),
        num(d.d_x),
        num(d.d_y),
        num(d.d_sum),
        num(d.j_x),
        num(d.j_y),
        num(d.j_sum),
        r.hypothesis_holds.to_string(),
        opt(r.entropy_lower_bound.c),
        opt(r.fisher_lower_bound.c),
        r.always_true_pass.to_string(),
        r.invalid.clone().unwrap_or_default(),
    ]
}

pub fn pair(reports: &[StabilityReport]) -> Result<String> {
    write(PAIR_COLUMNS, reports.iter().enumerate().map(|(i, r)| pair_row(i, r)).collect())
}

pub fn suite(report: &SuiteReport) -> Result<String> {
    pair(&report.reports)
}

pub fn counterexample(reports: &[CounterexampleReport]) -> Result<String> {
    let mut rows = Vec::new();
    for r in reports {
        for (row, cert) in r.asymptotics.rows.iter().zip(&r.certificates) {
            rows.push(vec![
                num(r.sigma),
                num(row.t),
                num(row.d),
                num(row.scaled_d),
                opt(row.d_diff),
                num(row.j_st),
                num(cert.c_d),
                num(cert.c_j),
            ]);
        }
    }
    write(COUNTEREXAMPLE_COLUMNS, rows)
}

pub fn sandwich(run: &SandwichRun) -> Result<String> {
    let rows = run
        .report
        .samples
        .iter()
        .zip(&run.report.ratios)
        .map(|(&(re, im), &q)| vec![num(re), num(im), num(q)])
        .collect();
    write(SANDWICH_COLUMNS, rows)
}

pub fn invert(reports: &[InvertReport]) -> Result<String> {
    let mut rows = Vec::new();
    for r in reports {
        for row in &r.rows {
            rows.push(vec![
                num(r.sigma),
                num(row.x),
                num(row.saddle),
                num(row.fft),
                num(row.rel_diff),
                num(row.derivative),
                num(row.finite_difference),
                num(row.derivative_diff),
            ]);
        }
    }
    write(INVERT_COLUMNS, rows)
}
