//! Report serialization: CSV with a stable column order, JSON via serde.
//!
//! Times are printed with millisecond precision in CSV; the JSON side keeps
//! full `f64` precision so reports round-trip losslessly.

use super::{RunRecord, SuiteReport, VariationReport};
use crate::clausedb::{UsageReport, USAGE_BUCKET_LABELS};
use serde::Serialize;
use std::io::{self, Write};

pub const RUN_CSV_HEADER: &str =
    "instance,seed,status,time,conflicts,decisions,warm_restarts,cold_restarts";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_run_row<W: Write>(out: &mut W, r: &RunRecord) -> io::Result<()> {
    writeln!(
        out,
        "{},{},{},{:.3},{},{},{},{}",
        csv_field(&r.instance),
        r.seed,
        r.status,
        r.wall_time_s,
        r.conflicts,
        r.decisions,
        r.warm_restarts,
        r.cold_restarts
    )
}

/// One row per run, in the stable column order.
pub fn write_runs_csv<W: Write>(out: &mut W, records: &[RunRecord]) -> io::Result<()> {
    writeln!(out, "{RUN_CSV_HEADER}")?;
    for r in records {
        write_run_row(out, r)?;
    }
    Ok(())
}

/// Variation-study CSV: the baseline run followed by every sample run.
pub fn write_variation_csv<W: Write>(out: &mut W, report: &VariationReport) -> io::Result<()> {
    writeln!(out, "{RUN_CSV_HEADER}")?;
    write_run_row(out, &report.baseline)?;
    for r in &report.samples {
        write_run_row(out, r)?;
    }
    Ok(())
}

pub fn write_suite_csv<W: Write>(out: &mut W, report: &SuiteReport) -> io::Result<()> {
    write_runs_csv(out, &report.records)
}

/// Usage table rows: raw and normalized totals per LBD bucket.
pub fn write_usage_csv<W: Write>(out: &mut W, report: &UsageReport) -> io::Result<()> {
    write!(out, "type")?;
    for label in USAGE_BUCKET_LABELS {
        write!(out, ",lbd{label}")?;
    }
    writeln!(out)?;
    let norm = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.4}"));
    for (name, row) in
        [("propagate_raw", &report.propagation_raw), ("conflict_raw", &report.conflict_raw)]
    {
        write!(out, "{name}")?;
        for value in row {
            write!(out, ",{value}")?;
        }
        writeln!(out)?;
    }
    for (name, row) in [
        ("propagate_normalized", &report.propagation_normalized),
        ("conflict_normalized", &report.conflict_normalized),
    ] {
        write!(out, "{name}")?;
        for &value in row {
            write!(out, ",{}", norm(value))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Pretty-printed JSON for any serializable report.
pub fn write_json<W: Write, T: Serialize>(out: &mut W, report: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)
}
