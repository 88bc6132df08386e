//! Distance/cost tables, Bloch-sphere paths and the files written by the CLI.
//!
//! Every function here is a pure function of a [`SplineReport`]; writing the
//! same report twice produces byte-identical files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{evaluate_cost, CostSummary, OrbitCheck, SplineReport};

/// Version of the `report.json` layout.
pub const REPORT_FORMAT: u32 = 1;

/// One line of the distance table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub t: f64,
    pub distance: f64,
    pub j_cont: f64,
    /// `j_cont + distance² / (2ε)` for this subinterval.
    pub j: f64,
    /// Sum of `j` over this and all earlier rows.
    pub j_running: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceTable {
    pub epsilon: f64,
    pub rows: Vec<TableRow>,
}

/// Distances in scientific notation with 3 significant digits.
pub fn format_distance(d: f64) -> String {
    format!("{d:.2e}")
}

/// Costs with 2 decimals.
pub fn format_cost(j: f64) -> String {
    format!("{j:.2}")
}

pub fn format_time(t: f64) -> String {
    format!("{t:.4}")
}

/// Builds the table: a zero row at `t = 0`, then one row per target.
pub fn build_table(report: &SplineReport) -> DistanceTable {
    let epsilon = report.settings.epsilon;
    let cost = evaluate_cost(report, epsilon);
    let mut rows = vec![TableRow {
        t: 0.0,
        distance: 0.0,
        j_cont: 0.0,
        j: 0.0,
        j_running: 0.0,
    }];
    let mut running = 0.0;
    for (sub, &j_cont) in report.subintervals.iter().zip(&cost.j_cont) {
        let d = sub.endpoint_distance;
        let j = j_cont + d * d / (2.0 * epsilon);
        running += j;
        rows.push(TableRow {
            t: sub.t_end,
            distance: d,
            j_cont,
            j,
            j_running: running,
        });
    }
    DistanceTable { epsilon, rows }
}

impl DistanceTable {
    /// Human-readable rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>8}  {:>10}  {:>10}  {:>10}  {:>10}\n",
            "t", "distance", "J_cont", "J", "J_total"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>8}  {:>10}  {:>10}  {:>10}  {:>10}\n",
                format_time(r.t),
                format_distance(r.distance),
                format_cost(r.j_cont),
                format_cost(r.j),
                format_cost(r.j_running)
            ));
        }
        out
    }

    pub fn to_csv(&self) -> io::Result<String> {
        let mut w = csv_writer();
        w.write_record(["t", "distance", "j_cont", "j", "j_running"])?;
        for r in &self.rows {
            w.write_record([
                format_time(r.t),
                format_distance(r.distance),
                format_cost(r.j_cont),
                format_cost(r.j),
                format_cost(r.j_running),
            ])?;
        }
        finish(w)
    }
}

/// Bloch-ball path of a qubit solve.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochPath {
    /// `(t, x2, x3, x4)` per trajectory sample; junction samples appear once.
    pub samples: Vec<[f64; 4]>,
    /// `(t, x2, x3, x4)` per target.
    pub targets: Vec<[f64; 4]>,
}

/// Extracts the σx, σy, σz coordinates of every sample and target.
pub fn export_bloch_path(report: &SplineReport) -> Result<BlochPath> {
    if report.n() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: report.n(),
        });
    }
    let mut samples = Vec::new();
    for (j, sub) in report.subintervals.iter().enumerate() {
        let skip = usize::from(j > 0);
        samples.extend(
            sub.trajectory.samples[skip..]
                .iter()
                .map(|s| [s.t, s.x[1], s.x[2], s.x[3]]),
        );
    }
    let targets = report
        .targets
        .iter()
        .map(|t| {
            let c = t.rho.element().coords();
            [t.t, c[1], c[2], c[3]]
        })
        .collect();
    Ok(BlochPath { samples, targets })
}

impl BlochPath {
    pub fn to_csv(&self) -> io::Result<String> {
        let mut w = csv_writer();
        w.write_record(["kind", "t", "x2", "x3", "x4"])?;
        for (kind, rows) in [("sample", &self.samples), ("target", &self.targets)] {
            for r in rows {
                w.write_record([
                    kind.to_string(),
                    r[0].to_string(),
                    r[1].to_string(),
                    r[2].to_string(),
                    r[3].to_string(),
                ])?;
            }
        }
        finish(w)
    }
}

/// All samples of all subintervals: `t, segment, x1.., y1.., v1..`.
pub fn trajectory_csv(report: &SplineReport) -> io::Result<String> {
    let d = report.basis.dim();
    let mut w = csv_writer();
    let mut header = vec!["t".to_string(), "segment".to_string()];
    for prefix in ["x", "y", "v"] {
        header.extend((1..=d).map(|l| format!("{prefix}{l}")));
    }
    w.write_record(&header)?;
    for (j, sub) in report.subintervals.iter().enumerate() {
        for s in &sub.trajectory.samples {
            let mut record = vec![s.t.to_string(), (j + 1).to_string()];
            record.extend(s.x.iter().chain(&s.y).chain(&s.v).map(f64::to_string));
            w.write_record(&record)?;
        }
    }
    finish(w)
}

#[derive(Serialize)]
struct SubintervalJson<'a> {
    index: usize,
    t_start: f64,
    t_end: f64,
    endpoint_distance: f64,
    j_cont: f64,
    iterations_run: usize,
    v0: &'a [f64],
    k_final: &'a [f64],
    shoot_residual: f64,
    k_consistency: f64,
    newton_steps: &'a [usize],
    distance_history: &'a [f64],
}

#[derive(Serialize)]
struct ReportJson<'a> {
    format: u32,
    n: usize,
    epsilon: f64,
    iterations: usize,
    steps: usize,
    tol_shoot: f64,
    tol_k: f64,
    cost: CostSummary,
    off_orbit_warning: bool,
    orbit_checks: &'a [OrbitCheck],
    rho_continuity: &'a [f64],
    h_continuity: &'a [f64],
    table: &'a [TableRow],
    subintervals: Vec<SubintervalJson<'a>>,
}

/// The `report.json` document.
pub fn report_json(report: &SplineReport) -> String {
    let table = build_table(report);
    let s = &report.settings;
    let doc = ReportJson {
        format: REPORT_FORMAT,
        n: report.n(),
        epsilon: s.epsilon,
        iterations: s.iterations,
        steps: s.steps,
        tol_shoot: s.tol_shoot,
        tol_k: s.tol_k,
        cost: report.cost,
        off_orbit_warning: report.off_orbit_warning(),
        orbit_checks: &report.orbit_checks,
        rho_continuity: &report.rho_continuity,
        h_continuity: &report.h_continuity,
        table: &table.rows,
        subintervals: report
            .subintervals
            .iter()
            .enumerate()
            .map(|(j, sub)| SubintervalJson {
                index: j + 1,
                t_start: sub.t_start,
                t_end: sub.t_end,
                endpoint_distance: sub.endpoint_distance,
                j_cont: sub.j_cont,
                iterations_run: sub.distance_history.len() - 1,
                v0: &sub.trajectory.first().v,
                k_final: sub.k_final.coords(),
                shoot_residual: sub.shoot_residual,
                k_consistency: sub.k_consistency,
                newton_steps: &sub.newton_steps,
                distance_history: &sub.distance_history,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report values are finite");
    text.push('\n');
    text
}

/// Writes `report.json`, `table.csv`, `trajectory.csv` and, for qubits,
/// `bloch.csv` into `dir`. Returns the paths written.
pub fn write_outputs(report: &SplineReport, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = vec![
        ("report.json", report_json(report)),
        ("table.csv", build_table(report).to_csv()?),
        ("trajectory.csv", trajectory_csv(report)?),
    ];
    if let Ok(path) = export_bloch_path(report) {
        files.push(("bloch.csv", path.to_csv()?));
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> io::Result<String> {
    let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
