use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::stats::quantile_sorted;
use crate::error::{param, Result};
use crate::geometry::{make_direction_grid, Target};
use crate::normalizers::Normalizer;
use crate::par;
use crate::rng::derive_seed;
use crate::sequences::SequenceSpec;
use crate::tracker::{GridTarget, HullSnapshot, TrackerState};

/// Default grid resolution by dimension.
pub fn default_grid_size(dim: usize) -> usize {
    match dim {
        1 => 2,
        2 => 512,
        _ => 1024,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: SequenceSpec,
    pub target: Target,
    pub normalizer: Normalizer,
    pub checkpoints: Vec<u64>,
    pub paths: usize,
    pub master_seed: u64,
    pub grid_size: usize,
    #[serde(default)]
    pub track_hull2d: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.normalizer.validate()?;
        if self.paths == 0 {
            return Err(param("paths must be at least 1"));
        }
        if self.checkpoints.is_empty() {
            return Err(param("at least one checkpoint is required"));
        }
        if self.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(param("checkpoints must be strictly increasing"));
        }
        for &n in &self.checkpoints {
            if n == 0 {
                return Err(param("checkpoints start at n = 1"));
            }
            if matches!(self.normalizer, Normalizer::C) && n < 20 {
                return Err(crate::Error::Domain(format!(
                    "checkpoint n = {n}: checkpoints must be >= 20 under the c normalizer"
                )));
            }
            self.normalizer.eval(n as f64).map_err(|e| match e {
                crate::Error::Domain(msg) => {
                    crate::Error::Domain(format!("checkpoint n = {n}: {msg}"))
                }
                other => other,
            })?;
        }
        if self.target.dim() != self.spec.dim() {
            return Err(param(format!(
                "target dimension {} does not match sequence dimension {}",
                self.target.dim(),
                self.spec.dim()
            )));
        }
        if self.grid_size < 2 {
            return Err(param("grid size must be at least 2"));
        }
        if self.track_hull2d && self.spec.dim() != 2 {
            return Err(param("exact hull tracking requires dimension 2"));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn path_seed(&self, path: usize) -> u64 {
        derive_seed(self.master_seed, path as u64)
    }
}

/// `n_j = ⌈start · ratio^j⌉` up to and including `max_n`, deduplicated.
pub fn geometric_checkpoints(start: u64, ratio: f64, max_n: u64) -> Result<Vec<u64>> {
    if start == 0 || !(ratio > 1.0) {
        return Err(param("geometric checkpoints need start >= 1 and ratio > 1"));
    }
    let mut out = Vec::new();
    let mut j = 0i32;
    loop {
        let n = (start as f64 * ratio.powi(j)).ceil() as u64;
        if n > max_n {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
        j += 1;
    }
    Ok(out)
}

/// Streams every path and applies `observe(path, snapshot)` at each checkpoint.
///
/// Paths run through [`par::map_indexed`]; the result is indexed by path and
/// checkpoint and does not depend on the worker count.
pub fn run_paths<T, F>(config: &ExperimentConfig, observe: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(usize, &HullSnapshot) -> Result<T> + Sync + Send,
{
    config.validate()?;
    let grid = Arc::new(make_direction_grid(config.spec.dim(), config.grid_size)?);
    par::map_indexed(config.paths, |path| {
        let mut state = config.spec.spawn(config.path_seed(path))?;
        let mut tracker = TrackerState::new(Arc::clone(&grid), config.track_hull2d)?;
        let mut buf = vec![0.0; config.spec.dim()];
        let mut out = Vec::with_capacity(config.checkpoints.len());
        for &n in &config.checkpoints {
            while tracker.n() < n {
                state.next_into(&mut buf);
                tracker.update(&buf);
            }
            out.push(observe(path, &tracker.snapshot(&config.normalizer)?)?);
        }
        Ok(out)
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantileRow {
    pub n: u64,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSeries {
    pub path_id: usize,
    pub seed: u64,
    /// Distance at each checkpoint.
    pub distances: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceCurve {
    pub checkpoints: Vec<u64>,
    pub paths: Vec<PathSeries>,
    pub quantiles: Vec<QuantileRow>,
    pub config_hash: String,
}

impl ConvergenceCurve {
    pub fn median_at(&self, n: u64) -> Option<f64> {
        self.quantiles.iter().find(|q| q.n == n).map(|q| q.q50)
    }

    pub fn medians(&self) -> Vec<f64> {
        self.quantiles.iter().map(|q| q.q50).collect()
    }
}

/// Per-checkpoint 10/50/90% quantiles across paths.
pub fn aggregate(checkpoints: &[u64], per_path: &[Vec<f64>]) -> Vec<QuantileRow> {
    checkpoints
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let mut col: Vec<f64> = per_path.iter().map(|p| p[j]).collect();
            col.sort_by(f64::total_cmp);
            QuantileRow {
                n,
                q10: quantile_sorted(&col, 0.1),
                q50: quantile_sorted(&col, 0.5),
                q90: quantile_sorted(&col, 0.9),
            }
        })
        .collect()
}

/// Distance of the normalized hull to the target at every checkpoint of every path.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceCurve> {
    config.validate()?;
    let grid = Arc::new(make_direction_grid(config.spec.dim(), config.grid_size)?);
    let target = GridTarget::new(config.target.clone(), &grid)?;
    let per_path = run_paths(config, |_, snap| target.distance(snap))?;
    let quantiles = aggregate(&config.checkpoints, &per_path);
    let paths = per_path
        .into_iter()
        .enumerate()
        .map(|(path_id, distances)| PathSeries {
            path_id,
            seed: config.path_seed(path_id),
            distances,
        })
        .collect();
    Ok(ConvergenceCurve {
        checkpoints: config.checkpoints.clone(),
        paths,
        quantiles,
        config_hash: config.hash(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ellipsoid, Interval};

    fn iid_config(checkpoints: Vec<u64>, paths: usize) -> ExperimentConfig {
        ExperimentConfig {
            spec: SequenceSpec::iid_scalar(1.0).unwrap(),
            target: Target::Interval(Interval::new(-1.0, 1.0).unwrap()),
            normalizer: Normalizer::B,
            checkpoints,
            paths,
            master_seed: 17,
            grid_size: 2,
            track_hull2d: false,
        }
    }

    #[test]
    fn geometric_schedule() {
        assert_eq!(
            geometric_checkpoints(100, 2.0, 1000).unwrap(),
            vec![100, 200, 400, 800]
        );
        assert_eq!(geometric_checkpoints(3, 1.1, 5).unwrap(), vec![3, 4, 5]);
        assert!(geometric_checkpoints(0, 2.0, 10).is_err());
    }

    #[test]
    fn validation_errors() {
        let mut c = iid_config(vec![2, 10], 2);
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("t > e") && err.contains("n = 2"), "{err}");
        c.checkpoints = vec![10, 10];
        assert!(c.validate().is_err());
        c.checkpoints = vec![16, 100];
        c.normalizer = Normalizer::C;
        assert!(c.validate().unwrap_err().to_string().contains(">= 20"));
        c.normalizer = Normalizer::B;
        c.target = Target::Ellipsoid(Ellipsoid::identity(2));
        assert!(c.validate().is_err());
    }

    #[test]
    fn deterministic_and_ordered() {
        let c = iid_config(vec![10, 100, 1000], 16);
        let a = run_convergence(&c).unwrap();
        let b = run_convergence(&c).unwrap();
        assert_eq!(a, b);
        for q in &a.quantiles {
            assert!(q.q10 <= q.q50 && q.q50 <= q.q90);
        }
        assert_eq!(a.paths.len(), 16);
        assert_eq!(a.config_hash.len(), 64);
    }

    #[test]
    fn unnormalized_maxima_diverge() {
        let mut c = iid_config(vec![10, 1000, 100_000], 20);
        c.normalizer = Normalizer::Constant { value: 1.0 };
        let m = run_convergence(&c).unwrap().medians();
        assert!(m[0] < m[1] && m[1] < m[2], "{m:?}");
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let c = iid_config(vec![10, 100], 8);
        let grid = Arc::new(make_direction_grid(1, 2).unwrap());
        let target = GridTarget::new(c.target.clone(), &grid).unwrap();
        let seq: Vec<Vec<f64>> = par::map_indexed_sequential(c.paths, |p| {
            let mut st = c.spec.spawn(c.path_seed(p)).unwrap();
            let mut tr = TrackerState::new(Arc::clone(&grid), false).unwrap();
            c.checkpoints
                .iter()
                .map(|&n| {
                    while tr.n() < n {
                        tr.update(&st.next_point());
                    }
                    target
                        .distance(&tr.snapshot(&c.normalizer).unwrap())
                        .unwrap()
                })
                .collect()
        });
        let curve = run_convergence(&c).unwrap();
        let par: Vec<Vec<f64>> = curve.paths.iter().map(|p| p.distances.clone()).collect();
        assert_eq!(seq, par);
    }
}
