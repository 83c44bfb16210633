//! Upper-quantile trajectory of `max_{k≤n} Y_k / b(n)` for a scalar sequence
//! whose marginals are sub-Gaussian with scale at most `σ`. The asymptotic
//! bound is `limsup ≤ σ`; the probe passes when the 90% quantile at the
//! largest `n` is at most `σ (1 + 0.1)`.

use serde::Serialize;

use super::stats::quantile_sorted;
use crate::error::{param, Result};
use crate::normalizers::Normalizer;
use crate::par;
use crate::rng::derive_seed;
use crate::sequences::SequenceSpec;

pub const LEMMA1_SLACK: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Row {
    pub n: u64,
    pub q90: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Table {
    pub sigma: f64,
    pub paths: usize,
    pub seed: u64,
    pub rows: Vec<Lemma1Row>,
    pub bound: f64,
    pub pass: bool,
}

pub fn lemma1_probe(
    spec: &SequenceSpec,
    sigma: f64,
    n_grid: &[u64],
    paths: usize,
    seed: u64,
) -> Result<Lemma1Table> {
    spec.validate()?;
    if spec.dim() != 1 {
        return Err(param("lemma1 probe needs a scalar sequence"));
    }
    if !(sigma > 0.0) {
        return Err(param("sigma must be positive"));
    }
    if spec.limiting_marginal_std() > sigma * (1.0 + 1e-12) {
        return Err(param(format!(
            "sequence marginals have limiting standard deviation {} > sigma = {sigma}",
            spec.limiting_marginal_std()
        )));
    }
    if paths == 0 {
        return Err(param("paths must be at least 1"));
    }
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("n grid must be nonempty and strictly increasing"));
    }
    let scales = n_grid
        .iter()
        .map(|&n| Normalizer::B.eval(n as f64))
        .collect::<Result<Vec<_>>>()?;

    let ratios: Vec<Vec<f64>> = par::map_indexed(paths, |p| {
        let mut state = spec.spawn(derive_seed(seed, p as u64))?;
        let mut buf = [0.0];
        let mut running = f64::NEG_INFINITY;
        let mut out = Vec::with_capacity(n_grid.len());
        for (&n, &scale) in n_grid.iter().zip(&scales) {
            while state.index() < n {
                state.next_into(&mut buf);
                running = running.max(buf[0]);
            }
            out.push(running / scale);
        }
        Ok(out)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let rows: Vec<Lemma1Row> = n_grid
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let mut col: Vec<f64> = ratios.iter().map(|r| r[j]).collect();
            col.sort_by(f64::total_cmp);
            Lemma1Row {
                n,
                q90: quantile_sorted(&col, 0.9),
            }
        })
        .collect();
    let bound = sigma * (1.0 + LEMMA1_SLACK);
    let pass = rows.last().is_some_and(|r| r.q90 <= bound);
    Ok(Lemma1Table {
        sigma,
        paths,
        seed,
        rows,
        bound,
        pass,
    })
}
