//! Exploratory probe of single-point exceedance `P{d(X_n / b(n), E) > ε}`.
//!
//! Only the trend of `n · p̂` is meaningful at desk-scale trial counts; the
//! table carries no pass/fail verdict.

use std::sync::Arc;

use serde::Serialize;

use super::stats::proportion_se;
use crate::error::{param, Result};
use crate::geometry::{make_direction_grid, Target};
use crate::normalizers::Normalizer;
use crate::par;
use crate::rng::derive_seed;
use crate::sequences::SequenceSpec;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub n: u64,
    pub p_hat: f64,
    pub n_times_p: f64,
    pub se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateTable {
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<RateRow>,
}

/// For each `n` in `n_grid`, the fraction of trials whose `X_n / b(n)` lies
/// farther than `epsilon` from the sequence's limit set. Distances are exact
/// in one dimension and measured on a `grid_size` direction grid in two.
pub fn rate_probe(
    spec: &SequenceSpec,
    epsilon: f64,
    n_grid: &[u64],
    trials: usize,
    seed: u64,
    grid_size: usize,
) -> Result<RateTable> {
    spec.validate()?;
    let dim = spec.dim();
    if dim > 2 {
        return Err(param("rate probe supports dimensions 1 and 2"));
    }
    if !(epsilon >= 0.0) {
        return Err(param("epsilon must be nonnegative"));
    }
    if trials == 0 {
        return Err(param("trials must be at least 1"));
    }
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("n grid must be nonempty and strictly increasing"));
    }
    let scales = n_grid
        .iter()
        .map(|&n| Normalizer::B.eval(n as f64))
        .collect::<Result<Vec<_>>>()?;
    let grid = Arc::new(make_direction_grid(dim, grid_size)?);
    let target: Target = spec.hull_limit()?;
    let profile = target.profile(&grid)?;

    let exceed: Vec<Vec<bool>> = par::map_indexed(trials, |t| {
        let mut state = spec.spawn(derive_seed(seed, t as u64))?;
        let mut buf = vec![0.0; dim];
        let mut hits = Vec::with_capacity(n_grid.len());
        for (&n, &scale) in n_grid.iter().zip(&scales) {
            state.advance(n - 1 - state.index());
            state.next_into(&mut buf);
            buf.iter_mut().for_each(|c| *c /= scale);
            hits.push(profile.point_excess(&buf)? > epsilon);
        }
        Ok(hits)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let rows = n_grid
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let p_hat = exceed.iter().filter(|h| h[j]).count() as f64 / trials as f64;
            RateRow {
                n,
                p_hat,
                n_times_p: n as f64 * p_hat,
                se: proportion_se(p_hat, trials),
            }
        })
        .collect();
    Ok(RateTable {
        epsilon,
        trials,
        seed,
        rows,
    })
}
