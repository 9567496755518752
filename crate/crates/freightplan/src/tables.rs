//! CSV tables: header row, UTF-8, LF line endings.

use freightplan_core::{CostBreakdown, ValidationReport};
use serde::Serialize;

fn render<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory writer");
    for row in rows {
        w.serialize(row).expect("flat row");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

pub fn cost_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a CostBreakdown)>) -> String {
    render(
        &["label", "fcl_fixed_cents", "fcl_variable_cents", "lcl_cents", "air_cents", "ground_cents", "penalty_cents", "total_cents"],
        rows.into_iter().map(|(label, c)| {
            (label, c.fcl_fixed_cents, c.fcl_variable_cents, c.lcl_cents, c.air_cents, c.ground_cents, c.penalty_cents, c.total_cents)
        }),
    )
}

pub fn violations_csv(report: &ValidationReport) -> String {
    render(
        &["family", "order", "edge", "week", "message"],
        report.violations.iter().map(|v| (v.family.to_string(), v.order.map(|o| o.0), v.edge.map(|e| e.0), v.week, &v.message)),
    )
}

pub fn compare_csv(rows: &[crate::report::CompareRow]) -> String {
    render(
        &[
            "solver",
            "total_cents",
            "fcl_units",
            "fcl_fixed_cents",
            "fcl_variable_cents",
            "lcl_cents",
            "air_cents",
            "ground_cents",
            "unservable",
            "heuristic_error",
        ],
        rows,
    )
}

pub fn suite_csv(rows: &[crate::report::SuiteRow]) -> String {
    render(&["solver", "scenario", "edges", "total_cents", "fcl_units", "unservable", "cost_increase_pct"], rows)
}
