//! CSV tables and the run manifest.
//!
//! Floats are written as `{:.16e}` (17 significant digits) so every value
//! parses back to the same double.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use hull_limits::experiments::{ConvergenceCurve, Lemma1Table, LevyReport, RateTable};
use hull_limits::geometry::{DirectionGrid, Point2};
use serde::Serialize;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))
}

fn finish(mut w: csv::Writer<std::fs::File>, path: &Path) -> Result<()> {
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))
}

/// `n,path_id,distance,q10,q50,q90`: per-path rows, then one `AGG` row per checkpoint.
pub fn write_curve(path: &Path, curve: &ConvergenceCurve) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["n", "path_id", "distance", "q10", "q50", "q90"])?;
    for (j, n) in curve.checkpoints.iter().enumerate() {
        for p in &curve.paths {
            w.write_record([
                n.to_string(),
                p.path_id.to_string(),
                num(p.distances[j]),
                String::new(),
                String::new(),
                String::new(),
            ])?;
        }
    }
    for q in &curve.quantiles {
        w.write_record([
            q.n.to_string(),
            "AGG".into(),
            String::new(),
            num(q.q10),
            num(q.q50),
            num(q.q90),
        ])?;
    }
    finish(w, path)
}

/// Aggregate rows read back from a curve file.
pub fn read_curve_quantiles(path: &Path) -> Result<Vec<(u64, [f64; 3])>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if &rec[1] == "AGG" {
            out.push((
                rec[0].parse()?,
                [rec[3].parse()?, rec[4].parse()?, rec[5].parse()?],
            ));
        }
    }
    Ok(out)
}

/// `x,lhs,rhs,se_combined,bound,exact_rhs,pass`.
pub fn write_levy(path: &Path, report: &LevyReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "x",
        "lhs",
        "rhs",
        "se_combined",
        "bound",
        "exact_rhs",
        "pass",
    ])?;
    for r in &report.rows {
        w.write_record([
            num(r.x),
            num(r.lhs),
            num(r.rhs),
            num(r.se_combined),
            num(r.bound),
            num(r.exact_rhs),
            r.pass.to_string(),
        ])?;
    }
    finish(w, path)
}

/// `n,p_hat,n_times_p,se`.
pub fn write_rate(path: &Path, table: &RateTable) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["n", "p_hat", "n_times_p", "se"])?;
    for r in &table.rows {
        w.write_record([r.n.to_string(), num(r.p_hat), num(r.n_times_p), num(r.se)])?;
    }
    finish(w, path)
}

/// `n,q90,bound`.
pub fn write_lemma1(path: &Path, table: &Lemma1Table) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["n", "q90", "bound"])?;
    for r in &table.rows {
        w.write_record([r.n.to_string(), num(r.q90), num(table.bound)])?;
    }
    finish(w, path)
}

/// `path_id,vertex,x,y`: final normalized hull vertices of every path.
pub fn write_hulls(path: &Path, hulls: &[Vec<Point2>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["path_id", "vertex", "x", "y"])?;
    for (p, hull) in hulls.iter().enumerate() {
        for (i, v) in hull.iter().enumerate() {
            w.write_record([p.to_string(), i.to_string(), num(v[0]), num(v[1])])?;
        }
    }
    finish(w, path)
}

/// `vertex,x,y`.
pub fn write_polygon(path: &Path, vertices: &[Point2]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["vertex", "x", "y"])?;
    for (i, v) in vertices.iter().enumerate() {
        w.write_record([i.to_string(), num(v[0]), num(v[1])])?;
    }
    finish(w, path)
}

/// `index,theta_0,…,theta_{d-1}`.
pub fn write_grid(path: &Path, grid: &DirectionGrid) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["index".to_string()];
    header.extend((0..grid.dim()).map(|k| format!("theta_{k}")));
    w.write_record(&header)?;
    for (i, d) in grid.directions().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(d.coords().iter().map(|&c| num(c)));
        w.write_record(&row)?;
    }
    finish(w, path)
}

#[derive(Clone, Debug, Serialize)]
pub struct GridParams {
    pub kind: String,
    pub dim: usize,
    pub size: usize,
}

/// Everything needed to rerun a command and reproduce its CSV output.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub arguments: serde_json::Value,
    pub config: Option<serde_json::Value>,
    pub config_hash: Option<String>,
    pub master_seed: u64,
    pub path_seeds: Vec<u64>,
    pub grid: Option<GridParams>,
    pub threads: usize,
    pub started_at_unix: f64,
    pub finished_at_unix: f64,
    pub outputs: Vec<String>,
    pub result: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, arguments: serde_json::Value, master_seed: u64) -> Self {
        Self {
            tool: "hull-limits",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            arguments,
            config: None,
            config_hash: None,
            master_seed,
            path_seeds: Vec::new(),
            grid: None,
            threads: rayon::current_num_threads(),
            started_at_unix: unix_now(),
            finished_at_unix: 0.0,
            outputs: Vec::new(),
            result: serde_json::Value::Null,
        }
    }

    pub fn write(mut self, out_dir: &Path, outputs: &[PathBuf]) -> Result<PathBuf> {
        self.outputs = outputs
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect();
        self.finished_at_unix = unix_now();
        let path = out_dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self)?;
        std::fs::write(&path, json + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}
