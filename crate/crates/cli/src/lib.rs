//! Command-line front end for `hull-limits`: flat TOML configs, CSV output,
//! run manifests and SVG plots.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use commands::ConfigSource;

#[derive(Debug, Parser)]
#[command(
    name = "hull-limits",
    version,
    about = "Limit sets of normalized Gaussian convex hulls"
)]
pub struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "HULL_LIMITS_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Experiment file (flat TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// Overrides the config's path count.
    #[arg(long)]
    pub paths: Option<usize>,
}

impl RunArgs {
    fn source(&self) -> ConfigSource {
        ConfigSource {
            config: self.config.clone(),
            seed: self.seed,
            paths: self.paths,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance of the normalized hull to its target across checkpoints.
    Converge {
        #[command(flatten)]
        run: RunArgs,
        /// Skip plot.svg.
        #[arg(long)]
        no_plot: bool,
    },
    /// Maximal inequality for the standard Gaussian random walk.
    Levy {
        /// Walk length.
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Comma-separated thresholds; defaults to an even grid on [0, 3√n].
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        /// Size of the default threshold grid.
        #[arg(long, default_value_t = commands::DEFAULT_LEVY_POINTS)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exceedance probabilities of single normalized points (checkpoints are the n grid, paths the trials).
    Rate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        epsilon: f64,
    },
    /// Upper quantile of the running maximum over b(n) for a scalar sequence.
    Lemma1 {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// Planar polytope-lines run with final hulls and an SVG overlay.
    PolytopeDemo {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        no_plot: bool,
    },
    /// Writes the direction grid used for a dimension and size.
    GridInfo {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(command: &Command) -> Result<Vec<PathBuf>> {
    match command {
        Command::Converge { run, no_plot } => commands::converge(&run.source(), &run.out, !no_plot),
        Command::Levy {
            n,
            trials,
            x,
            points,
            seed,
            out,
        } => {
            let grid = x
                .clone()
                .unwrap_or_else(|| commands::default_levy_grid(*n, *points));
            commands::levy(*n, *trials, &grid, *seed, out)
        }
        Command::Rate { run, epsilon } => commands::rate(&run.source(), *epsilon, &run.out),
        Command::Lemma1 { run, sigma } => commands::lemma1(&run.source(), *sigma, &run.out),
        Command::PolytopeDemo { run, no_plot } => {
            commands::polytope_demo(&run.source(), &run.out, !no_plot)
        }
        Command::GridInfo { dim, m, out } => commands::grid_info(*dim, *m, out),
    }
}

/// Runs a parsed command line, inside a dedicated pool when `--threads` is set.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    match cli.threads {
        Some(0) => bail!("--threads must be at least 1"),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    }
}
