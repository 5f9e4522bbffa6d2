//! CSV result tables.

use std::io::Write;

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::experiments::{CouplingRow, Dynamics, FrequencyReport, RCharacteristicReport};

#[derive(Serialize)]
struct MatrixRecord<'a> {
    b: f64,
    matrix: usize,
    dynamics: &'a str,
    deepest_energy: f64,
    hits: usize,
    starts: usize,
    frequency: f64,
}

#[derive(Serialize)]
struct FrequencyRecord<'a> {
    b: f64,
    dynamics: &'a str,
    mean_frequency: f64,
    matrices: usize,
    starts: usize,
}

#[derive(Serialize)]
struct RRecord<'a> {
    b: f64,
    dynamics: &'a str,
    mean_r: Option<f64>,
    defined_runs: usize,
    undefined_runs: usize,
    matrices_used: usize,
    starts: usize,
}

#[derive(Serialize)]
struct CouplingRecord {
    b: f64,
    expected: f64,
    mean_coupling: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct TraceRecord {
    step: usize,
    unit: Option<usize>,
    energy: f64,
}

/// One record per (matrix, dynamics).
pub fn write_fig1_csv<W: Write>(report: &FrequencyReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for mf in &report.per_matrix {
        for d in Dynamics::ALL {
            let hits = mf.hits[d as usize];
            w.serialize(MatrixRecord {
                b: report.distortion,
                matrix: mf.matrix + 1,
                dynamics: d.label(),
                deepest_energy: mf.deepest_energy,
                hits,
                starts: report.starts,
                frequency: hits as f64 / report.starts as f64,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One record per (b, dynamics).
pub fn write_fig2_csv<W: Write>(reports: &[FrequencyReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        for d in Dynamics::ALL {
            w.serialize(FrequencyRecord {
                b: r.distortion,
                dynamics: d.label(),
                mean_frequency: r.mean(d),
                matrices: r.matrices,
                starts: r.starts,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One record per (b, dynamics); `mean_r` is empty when undefined.
pub fn write_fig3_csv<W: Write>(report: &RCharacteristicReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.rows {
        w.serialize(RRecord {
            b: row.distortion,
            dynamics: row.dynamics.label(),
            mean_r: row.mean_r,
            defined_runs: row.defined_runs,
            undefined_runs: row.undefined_runs,
            matrices_used: row.matrices_used,
            starts: report.starts,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table1_csv<W: Write>(rows: &[CouplingRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CouplingRecord {
            b: r.distortion,
            expected: r.expected,
            mean_coupling: r.mean_coupling,
            deviation: r.mean_coupling - r.expected,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Energy after every accepted flip; step 0 is the initial state. Requires
/// a recorded trajectory.
pub fn write_trace_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.serialize(TraceRecord {
        step: 0,
        unit: None,
        energy: traj.initial_energy,
    })?;
    let energies = traj.energy_trace.as_deref().unwrap_or(&[]);
    let units = traj.flipped.as_deref().unwrap_or(&[]);
    for (k, (&e, &u)) in energies.iter().zip(units).enumerate() {
        w.serialize(TraceRecord {
            step: k + 1,
            unit: Some(u + 1),
            energy: e,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Renders a writer-based table into a string.
pub fn to_string<F>(write: F) -> Result<String>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}
