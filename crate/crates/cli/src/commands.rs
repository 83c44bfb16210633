//! Subcommand implementations. Each writes its CSV files and a manifest into
//! the output directory and returns the paths written.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use hull_limits::experiments::{
    aggregate, lemma1_probe, levy_check, rate_probe, run_convergence, run_paths, ConvergenceCurve,
    ExperimentConfig, PathSeries,
};
use hull_limits::geometry::{make_direction_grid, DirectionGrid, Hull2d, Point2, Target};
use hull_limits::sequences::SequenceSpec;
use hull_limits::tracker::GridTarget;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{self, GridParams, RunManifest};
use crate::svg;

/// Config file plus the command-line overrides shared by experiment commands.
#[derive(Clone, Debug)]
pub struct ConfigSource {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
}

impl ConfigSource {
    pub fn resolve(&self) -> Result<(RunConfig, ExperimentConfig)> {
        let mut flat = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            flat.seed = Some(seed);
        }
        if let Some(paths) = self.paths {
            flat.paths = Some(paths);
        }
        let experiment = flat.experiment()?;
        Ok((flat, experiment))
    }
}

fn prepare(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))
}

fn grid_params(grid: &DirectionGrid) -> GridParams {
    GridParams {
        kind: format!("{:?}", grid.kind()),
        dim: grid.dim(),
        size: grid.len(),
    }
}

fn experiment_manifest(
    command: &str,
    arguments: serde_json::Value,
    config: &ExperimentConfig,
) -> Result<RunManifest> {
    let grid = make_direction_grid(config.spec.dim(), config.grid_size)?;
    let mut m = RunManifest::new(command, arguments, config.master_seed);
    m.config = Some(serde_json::to_value(config)?);
    m.config_hash = Some(config.hash());
    m.path_seeds = (0..config.paths).map(|p| config.path_seed(p)).collect();
    m.grid = Some(grid_params(&grid));
    Ok(m)
}

fn write_resolved(out: &Path, config: &ExperimentConfig) -> Result<PathBuf> {
    let path = out.join("config.resolved.toml");
    std::fs::write(&path, RunConfig::from_experiment(config).to_toml())
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn write_svg(path: PathBuf, body: String) -> Result<PathBuf> {
    std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn print_quantiles(curve: &ConvergenceCurve) {
    println!("{:>12} {:>12} {:>12} {:>12}", "n", "q10", "q50", "q90");
    for q in &curve.quantiles {
        println!(
            "{:>12} {:>12.6} {:>12.6} {:>12.6}",
            q.n, q.q10, q.q50, q.q90
        );
    }
}

pub fn converge(src: &ConfigSource, out: &Path, plot: bool) -> Result<Vec<PathBuf>> {
    let (_, config) = src.resolve()?;
    prepare(out)?;
    let mut manifest = experiment_manifest(
        "converge",
        json!({ "config": src.config, "plot": plot }),
        &config,
    )?;
    let curve = run_convergence(&config)?;
    let curve_path = out.join("curve.csv");
    output::write_curve(&curve_path, &curve)?;
    let mut written = vec![curve_path.clone(), write_resolved(out, &config)?];
    if plot {
        let rows = output::read_curve_quantiles(&curve_path)?;
        let title = format!(
            "{} / {}",
            config.spec.kind_name(),
            config.normalizer.label()
        );
        written.push(write_svg(
            out.join("plot.svg"),
            svg::curve_plot(&rows, &title),
        )?);
    }
    print_quantiles(&curve);
    manifest.result = json!({ "medians": curve.medians() });
    written.push(manifest.write(out, &written)?);
    Ok(written)
}

pub const DEFAULT_LEVY_POINTS: usize = 10;

/// Evenly spaced thresholds on `[0, 3√n]`.
pub fn default_levy_grid(n: u64, points: usize) -> Vec<f64> {
    let top = 3.0 * (n as f64).sqrt();
    match points {
        0 => Vec::new(),
        1 => vec![top],
        _ => (0..points)
            .map(|i| top * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

pub fn levy(n: u64, trials: usize, x_grid: &[f64], seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    let mut manifest = RunManifest::new(
        "levy",
        json!({ "n": n, "trials": trials, "x": x_grid }),
        seed,
    );
    let report = levy_check(n, x_grid, trials, seed)?;
    prepare(out)?;
    let path = out.join("levy.csv");
    output::write_levy(&path, &report)?;
    println!(
        "levy n = {n}, trials = {trials}: {}",
        if report.all_pass() { "pass" } else { "FAIL" }
    );
    manifest.result = json!({ "all_pass": report.all_pass() });
    let mut written = vec![path];
    written.push(manifest.write(out, &written)?);
    Ok(written)
}

fn warn_ignored(flat: &RunConfig, command: &str) {
    if flat.target.is_some() || flat.normalizer.is_some() {
        eprintln!("note: {command} always uses b(n) and the sequence's limit set; target and normalizer keys are ignored");
    }
}

pub fn rate(src: &ConfigSource, epsilon: f64, out: &Path) -> Result<Vec<PathBuf>> {
    let (flat, config) = src.resolve()?;
    warn_ignored(&flat, "rate");
    let mut manifest = experiment_manifest(
        "rate",
        json!({ "config": src.config, "epsilon": epsilon }),
        &config,
    )?;
    let table = rate_probe(
        &config.spec,
        epsilon,
        &config.checkpoints,
        config.paths,
        config.master_seed,
        config.grid_size,
    )?;
    prepare(out)?;
    let path = out.join("rate.csv");
    output::write_rate(&path, &table)?;
    println!("{:>12} {:>14} {:>14}", "n", "p_hat", "n*p_hat");
    for r in &table.rows {
        println!("{:>12} {:>14.6e} {:>14.6e}", r.n, r.p_hat, r.n_times_p);
    }
    manifest.result =
        json!({ "n_times_p": table.rows.iter().map(|r| r.n_times_p).collect::<Vec<_>>() });
    let mut written = vec![path, write_resolved(out, &config)?];
    written.push(manifest.write(out, &written)?);
    Ok(written)
}

pub fn lemma1(src: &ConfigSource, sigma: f64, out: &Path) -> Result<Vec<PathBuf>> {
    let (flat, config) = src.resolve()?;
    warn_ignored(&flat, "lemma1");
    let mut manifest = experiment_manifest(
        "lemma1",
        json!({ "config": src.config, "sigma": sigma }),
        &config,
    )?;
    let table = lemma1_probe(
        &config.spec,
        sigma,
        &config.checkpoints,
        config.paths,
        config.master_seed,
    )?;
    prepare(out)?;
    let path = out.join("lemma1.csv");
    output::write_lemma1(&path, &table)?;
    let last = table.rows.last().map(|r| r.q90).unwrap_or(f64::NAN);
    println!(
        "q90 at largest n = {last:.6}, bound {:.3}: {}",
        table.bound,
        if table.pass { "pass" } else { "FAIL" }
    );
    manifest.result = json!({ "pass": table.pass, "bound": table.bound });
    let mut written = vec![path, write_resolved(out, &config)?];
    written.push(manifest.write(out, &written)?);
    Ok(written)
}

/// Boundary polygon of a planar target, traced on `grid` for smooth bodies.
pub fn target_polygon(target: &Target, grid: &DirectionGrid) -> Vec<Point2> {
    match target {
        Target::Polytope(p) => Hull2d::from_points(p.vertices().iter().map(|v| [v[0], v[1]]))
            .vertices()
            .to_vec(),
        Target::Ellipsoid(e) => {
            let s = e.sigma();
            grid.directions()
                .map(|d| {
                    let t = d.coords();
                    let st = [s[0] * t[0] + s[1] * t[1], s[2] * t[0] + s[3] * t[1]];
                    let h = e.quadratic_form(t).sqrt();
                    if h > 0.0 {
                        [st[0] / h, st[1] / h]
                    } else {
                        [0.0, 0.0]
                    }
                })
                .collect()
        }
        Target::Interval(_) => Vec::new(),
    }
}

pub fn polytope_demo(src: &ConfigSource, out: &Path, plot: bool) -> Result<Vec<PathBuf>> {
    let (_, mut config) = src.resolve()?;
    if !matches!(config.spec, SequenceSpec::PolytopeLines { .. }) {
        bail!("config key `kind`: polytope-demo needs kind = \"polytope-lines\"");
    }
    if config.spec.dim() != 2 {
        bail!("config key `directions`: polytope-demo needs two-dimensional directions");
    }
    config.track_hull2d = true;
    prepare(out)?;
    let mut manifest = experiment_manifest(
        "polytope-demo",
        json!({ "config": src.config, "plot": plot }),
        &config,
    )?;

    let grid = Arc::new(make_direction_grid(2, config.grid_size)?);
    let target = GridTarget::new(config.target.clone(), &grid)?;
    let last = *config.checkpoints.last().expect("validated");
    let per_path = run_paths(&config, |_, snap| {
        let hull = if snap.n == last {
            snap.vertices.clone()
        } else {
            None
        };
        Ok((target.distance(snap)?, hull))
    })?;
    let mut hulls = Vec::with_capacity(per_path.len());
    let distances: Vec<Vec<f64>> = per_path
        .into_iter()
        .map(|row| {
            let mut ds = Vec::with_capacity(row.len());
            for (d, h) in row {
                ds.push(d);
                if let Some(h) = h {
                    hulls.push(h);
                }
            }
            ds
        })
        .collect();
    let curve = ConvergenceCurve {
        checkpoints: config.checkpoints.clone(),
        quantiles: aggregate(&config.checkpoints, &distances),
        paths: distances
            .into_iter()
            .enumerate()
            .map(|(path_id, distances)| PathSeries {
                path_id,
                seed: config.path_seed(path_id),
                distances,
            })
            .collect(),
        config_hash: config.hash(),
    };

    let curve_path = out.join("curve.csv");
    output::write_curve(&curve_path, &curve)?;
    let hull_path = out.join("hull.csv");
    output::write_hulls(&hull_path, &hulls)?;
    let polygon = target_polygon(&config.target, &grid);
    let target_path = out.join("target.csv");
    output::write_polygon(&target_path, &polygon)?;
    let mut written = vec![
        curve_path,
        hull_path,
        target_path,
        write_resolved(out, &config)?,
    ];
    if plot {
        let title = format!("normalized hulls at n = {last}");
        written.push(write_svg(
            out.join("overlay.svg"),
            svg::overlay_plot(&polygon, &hulls, &title),
        )?);
    }
    print_quantiles(&curve);
    manifest.result = json!({ "medians": curve.medians() });
    written.push(manifest.write(out, &written)?);
    Ok(written)
}

pub fn grid_info(dim: usize, m: usize, out: &Path) -> Result<Vec<PathBuf>> {
    let grid = make_direction_grid(dim, m)?;
    prepare(out)?;
    let mut manifest = RunManifest::new("grid-info", json!({ "dim": dim, "m": m }), 0);
    manifest.grid = Some(grid_params(&grid));
    let path = out.join("directions.csv");
    output::write_grid(&path, &grid)?;
    println!(
        "{:?} grid: dim = {}, directions = {}",
        grid.kind(),
        grid.dim(),
        grid.len()
    );
    let mut written = vec![path];
    written.push(manifest.write(out, &written)?);
    Ok(written)
}
