//! CSV and JSON writers. Numbers use the shortest form that reads back to
//! the same `f64`, so identical runs give byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::dynamics::{MassSizing, SimTrace};
use crate::error::{Error, Result};
use crate::mech_char::FrequencyResponse;
use crate::static_design::SweepTable;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Common wrapper of every JSON output.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, R> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub results: R,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_json<R: Serialize>(
    path: &Path,
    command: &str,
    config: &RunConfig,
    results: R,
) -> Result<PathBuf> {
    let envelope = Envelope {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command,
        config,
        results,
    };
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &envelope).map_err(|e| Error::Serialize(e.to_string()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<PathBuf>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(create(path)?);
    let fail = |e: csv::Error| Error::Serialize(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn n(v: f64) -> String {
    format!("{v:e}")
}

/// Quantity/value/unit rows, for scalar reports.
pub fn write_key_values(path: &Path, rows: &[(&str, f64, &str)]) -> Result<PathBuf> {
    write_csv(
        path,
        &["quantity", "value", "unit"],
        rows.iter()
            .map(|(k, v, u)| vec![k.to_string(), n(*v), u.to_string()]),
    )
}

pub fn write_sweep_csv(path: &Path, table: &SweepTable<f64>) -> Result<PathBuf> {
    let header = [
        "i",
        "j",
        table.x_axis.name,
        table.y_axis.name,
        "finger_count",
        "c_max",
        "c_min",
        "v_sat",
        "p_out",
        "voltage_ok",
        "power_ok",
        "discharge_dominated",
        "error",
    ];
    write_csv(
        path,
        &header,
        table.cells.iter().map(|c| {
            vec![
                c.i.to_string(),
                c.j.to_string(),
                n(c.x),
                n(c.y),
                c.finger_count.to_string(),
                n(c.c_max),
                n(c.c_min),
                n(c.v_sat),
                n(c.p_out),
                c.voltage_ok.to_string(),
                c.power_ok.to_string(),
                c.discharge_dominated.to_string(),
                c.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

/// Writes `trace.csv`, `events.csv` and `cycles.csv` into `dir`.
pub fn write_trace_csv(
    dir: &Path,
    trace: &SimTrace<f64>,
    capacitance: impl Fn(f64) -> f64,
) -> Result<Vec<PathBuf>> {
    let samples = write_csv(
        &dir.join("trace.csv"),
        &["t", "z", "z_dot", "q_v", "v_stor", "capacitance", "phase"],
        trace.samples.iter().map(|s| {
            vec![
                n(s.t),
                n(s.z),
                n(s.z_dot),
                n(s.q_v),
                n(s.v_stor),
                n(capacitance(s.z)),
                format!("{:?}", s.phase),
            ]
        }),
    )?;
    let events = write_csv(
        &dir.join("events.csv"),
        &[
            "t",
            "kind",
            "capacitance",
            "z",
            "z_dot_before",
            "z_dot_after",
            "q_v_before",
            "q_v_after",
            "v_stor_before",
            "v_stor_after",
        ],
        trace.events.iter().map(|e| {
            vec![
                n(e.t),
                e.kind.label().to_string(),
                n(e.capacitance),
                n(e.after.z),
                n(e.before.z_dot),
                n(e.after.z_dot),
                n(e.before.q_v),
                n(e.after.q_v),
                n(e.before.v_stor),
                n(e.after.v_stor),
            ]
        }),
    )?;
    let cycles = write_csv(
        &dir.join("cycles.csv"),
        &[
            "index",
            "t",
            "c_at_charge",
            "c_at_transfer",
            "v_stor_before",
            "v_stor_after",
            "mech_work",
            "source_energy",
            "load_energy",
            "switch_loss",
            "stored_start",
            "stored_end",
            "balance_error",
        ],
        trace.cycles.iter().map(|c| {
            vec![
                c.index.to_string(),
                n(c.t),
                n(c.c_at_charge),
                n(c.c_at_transfer),
                n(c.v_stor_before),
                n(c.v_stor_after),
                n(c.mech_work),
                n(c.source_energy),
                n(c.load_energy),
                n(c.switch_loss),
                n(c.stored_start),
                n(c.stored_end),
                n(c.balance_error()),
            ]
        }),
    )?;
    Ok(vec![samples, events, cycles])
}

pub fn write_response_csv(path: &Path, response: &FrequencyResponse<f64>) -> Result<PathBuf> {
    write_csv(
        path,
        &["frequency_hz", "amplitude_m"],
        response.points.iter().map(|&(f, a)| vec![n(f), n(a)]),
    )
}

pub fn write_sizing_csv(path: &Path, sizing: &MassSizing<f64>) -> Result<PathBuf> {
    write_csv(
        path,
        &[
            "mass",
            "spring_constant",
            "max_displacement",
            "reached",
            "failed",
        ],
        sizing.candidates.iter().map(|c| {
            vec![
                n(c.mass),
                n(c.spring_constant),
                n(c.max_displacement),
                c.reached.to_string(),
                c.failed.to_string(),
            ]
        }),
    )
}
