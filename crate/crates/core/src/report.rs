//! CSV emission. Reals use 17 significant digits in scientific notation,
//! fields are separated by `,`, lines end with LF.

use std::io::Write;

use csv::{Terminator, WriterBuilder};

use crate::checks::CheckRow;
use crate::error::Result;
use crate::mesh::Mesh;
use crate::solver::SolveResult;
use crate::stability::{StabilityReport, REPORT_HEADER};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    WriterBuilder::new()
        .delimiter(b',')
        .terminator(Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_gap_csv<W: Write>(out: W, rows: &[CheckRow]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["check_name", "trial", "lhs", "rhs", "satisfied"])?;
    for row in rows {
        w.write_record([
            row.check_name.to_string(),
            row.trial.to_string(),
            fmt_real(row.report.lhs),
            fmt_real(row.report.rhs),
            row.report.satisfied.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_solution_csv<W: Write>(out: W, mesh: &Mesh, result: &SolveResult) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["vertex_id", "x", "y", "w"])?;
    for (v, (pt, value)) in mesh.vertices().iter().zip(result.w.values()).enumerate() {
        w.write_record([
            v.to_string(),
            fmt_real(pt[0]),
            fmt_real(pt[1]),
            fmt_real(*value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, result: &SolveResult) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "iterations",
        "final_energy",
        "residual_norm",
        "final_regularization",
    ])?;
    w.write_record([
        result.iterations.to_string(),
        fmt_real(result.final_energy),
        fmt_real(result.residual_norm),
        fmt_real(result.final_regularization),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn write_stability_csv<W: Write>(out: W, report: &StabilityReport) -> Result<()> {
    let mut w = writer(out);
    w.write_record(REPORT_HEADER)?;
    for row in &report.rows {
        let mut record = vec![row.i.to_string()];
        record.extend(row.values().iter().map(|v| fmt_real(*v)));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
