//! Files written for a run. Everything except `timings.json` is a pure
//! function of the scenario and seed.

use std::fs;
use std::io;
use std::path::Path;

use crate::run::RunReport;

pub const GRID_FILE: &str = "grid.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const STAGES_FILE: &str = "stages.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const TIMINGS_FILE: &str = "timings.json";

/// 17 significant digits: lossless for `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

fn write_grid(report: &RunReport, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header: Vec<String> = report
        .grid
        .coords
        .iter()
        .flat_map(|c| [format!("{c}_re"), format!("{c}_im")])
        .collect();
    header.extend(["F_re", "F_im", "oracle_re", "oracle_im", "abs_err", "cr_residual"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    for row in &report.grid.rows {
        let mut rec: Vec<String> = row.point.iter().flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)]).collect();
        rec.push(fmt_f64(row.value.re));
        rec.push(fmt_f64(row.value.im));
        match row.oracle {
            Some(o) => {
                rec.push(fmt_f64(o.re));
                rec.push(fmt_f64(o.im));
            }
            None => rec.extend([String::new(), String::new()]),
        }
        rec.push(fmt_f64(row.abs_err));
        rec.push(fmt_f64(row.cr_residual));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()
}

fn write_stages(report: &RunReport, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["stage", "detail"]).map_err(csv_err)?;
    for s in &report.stages {
        w.write_record([&s.stage, &s.detail]).map_err(csv_err)?;
    }
    if let Some(e) = &report.error {
        w.write_record([&e.stage, &format!("error: {}", e.message)]).map_err(csv_err)?;
    }
    w.flush()
}

fn write_convergence(report: &RunReport, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["nodes", "max_abs_error", "ratio"]).map_err(csv_err)?;
    let mut prev: Option<f64> = None;
    for r in &report.convergence {
        let ratio = prev.map(|p| fmt_f64(p / r.max_abs_error)).unwrap_or_default();
        w.write_record([r.nodes.to_string(), fmt_f64(r.max_abs_error), ratio]).map_err(csv_err)?;
        prev = Some(r.max_abs_error);
    }
    w.flush()
}

fn write_json(value: &impl serde::Serialize, path: &Path) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Writes all outputs into `dir`, creating it, and records the file names in `report.files`.
pub fn write_outputs(report: &mut RunReport, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut files = vec![GRID_FILE, STAGES_FILE];
    if !report.convergence.is_empty() {
        files.push(CONVERGENCE_FILE);
    }
    files.extend([SUMMARY_FILE, TIMINGS_FILE]);
    report.files = files.iter().map(|f| f.to_string()).collect();
    write_grid(report, &dir.join(GRID_FILE))?;
    write_stages(report, &dir.join(STAGES_FILE))?;
    if !report.convergence.is_empty() {
        write_convergence(report, &dir.join(CONVERGENCE_FILE))?;
    }
    write_json(report, &dir.join(SUMMARY_FILE))?;
    write_json(&report.timings, &dir.join(TIMINGS_FILE))
}
