//! Time-series CSV, phase-space snapshots and the instability report.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, InstabilityReport, Result};
use crate::grid::PhaseGrid;
use crate::stepper::DistributionState;

pub const TIMESERIES_HEADER: &str = "t,Q,Q1,Q2,energy,first_mode,energy_drift";

/// Moment orders written after the fixed columns, in record order.
fn extra_orders(records: &[DiagnosticsRecord]) -> Vec<u32> {
    records
        .first()
        .map(|r| r.moments.iter().map(|&(k, _)| k).filter(|k| *k > 2).collect())
        .unwrap_or_default()
}

fn moment_or_nan(r: &DiagnosticsRecord, k: u32) -> f64 {
    r.moment(k).unwrap_or(f64::NAN)
}

/// One row per record. Values use the shortest decimal form that parses back
/// to the same `f64`. Moment orders above 2 become extra `Q<r>` columns.
pub fn write_timeseries(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let extra = extra_orders(records);
    write!(w, "{TIMESERIES_HEADER}")?;
    for k in &extra {
        write!(w, ",Q{k}")?;
    }
    writeln!(w)?;
    for r in records {
        write!(
            w,
            "{},{},{},{},{},{},{}",
            r.t,
            r.mass,
            moment_or_nan(r, 1),
            moment_or_nan(r, 2),
            r.energy,
            r.first_mode,
            r.energy_drift
        )?;
        for &k in &extra {
            write!(w, ",{}", moment_or_nan(r, k))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a time-series file as `(header, values)`.
pub fn read_timeseries(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty time series".into() })?
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .enumerate()
        .map(|(i, l)| {
            l.split(',')
                .map(|v| {
                    v.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 2,
                        msg: format!("bad number `{v}`"),
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

/// Nodal values of `f` in physical coordinates, one `x v f` row per node.
pub fn write_snapshot(state: &DistributionState, grid: &PhaseGrid, t: f64, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# t={t}")?;
    writeln!(
        w,
        "# basis={} N={} M={} alpha={}",
        grid.kind(),
        grid.n(),
        grid.m(),
        grid.velocity.alpha
    )?;
    let f = state.f_values(grid);
    for (n, &x) in grid.x_phys.iter().enumerate() {
        for (m, &v) in grid.v_phys.iter().enumerate() {
            writeln!(w, "{x} {v} {}", f[[n, m]])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_instability_report(report: &InstabilityReport, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "step={}", report.step)?;
    writeln!(w, "t={}", report.t)?;
    writeln!(w, "max_abs_coeff={}", report.max_abs_coeff)?;
    writeln!(w, "basis={}", report.basis)?;
    w.flush()?;
    Ok(())
}

/// File name of the snapshot taken at `t`.
pub fn snapshot_file_name(t: f64) -> String {
    format!("snapshot_t{t}.txt")
}
