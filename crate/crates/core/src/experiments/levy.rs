//! Monte Carlo check of the maximal inequality
//! `P(max_{k≤n} |S_k| ≥ x) ≤ 2 P(|S_n| ≥ x)` for a standard-normal random walk.

use serde::Serialize;
use statrs::function::erf::erfc;

use super::stats::proportion_se;
use crate::error::{param, Result};
use crate::par;
use crate::rng::PathRng;

pub const MIN_TRIALS: usize = 10_000;

/// Slack, in combined standard errors, allowed before a grid point fails.
pub const SLACK_SE: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevyRow {
    pub x: f64,
    /// Empirical `P(max_{k≤n} |S_k| ≥ x)`.
    pub lhs: f64,
    /// Empirical `P(|S_n| ≥ x)`.
    pub rhs: f64,
    /// `sqrt(se(lhs)² + 4 se(rhs)²)`.
    pub se_combined: f64,
    /// `2·rhs + 3·se_combined`.
    pub bound: f64,
    /// `2(1 − Φ(x/√n))`.
    pub exact_rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevyReport {
    pub n: u64,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<LevyRow>,
}

impl LevyReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Running maximum of `|S_k|` and the final `|S_n|` for one walk.
fn walk_extremes(n: u64, rng: &mut PathRng) -> (f64, f64) {
    let mut s = 0.0f64;
    let mut max_abs = 0.0f64;
    for _ in 0..n {
        s += rng.standard_normal();
        max_abs = max_abs.max(s.abs());
    }
    (max_abs, s.abs())
}

pub fn levy_check(n: u64, x_grid: &[f64], trials: usize, seed: u64) -> Result<LevyReport> {
    if n == 0 {
        return Err(param("walk length n must be at least 1"));
    }
    if trials < MIN_TRIALS {
        return Err(param(format!(
            "levy check needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    if x_grid.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
        return Err(param("levy thresholds must be finite and nonnegative"));
    }
    let samples = par::map_indexed(trials, |t| {
        walk_extremes(n, &mut PathRng::for_path(seed, t as u64))
    });
    let rows = x_grid
        .iter()
        .map(|&x| {
            let lhs_hits = samples.iter().filter(|(m, _)| *m >= x).count();
            let rhs_hits = samples.iter().filter(|(_, s)| *s >= x).count();
            let lhs = lhs_hits as f64 / trials as f64;
            let rhs = rhs_hits as f64 / trials as f64;
            let se_combined = (proportion_se(lhs, trials).powi(2)
                + 4.0 * proportion_se(rhs, trials).powi(2))
            .sqrt();
            let bound = 2.0 * rhs + SLACK_SE * se_combined;
            LevyRow {
                x,
                lhs,
                rhs,
                se_combined,
                bound,
                exact_rhs: erfc(x / (2.0 * n as f64).sqrt()),
                pass: lhs <= bound,
            }
        })
        .collect();
    Ok(LevyReport {
        n,
        trials,
        seed,
        rows,
    })
}
