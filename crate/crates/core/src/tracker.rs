//! Streaming hull state: per-direction running maxima of `⟨X_k, θ_i⟩`.
//!
//! The support function of `conv{X_1, …, X_n}` at `θ` is `max_k ⟨X_k, θ⟩`, so
//! the hull is carried as `M` running maxima with `O(M)` memory and at most
//! `O(M·d)` work per point. Points strictly inside the ball of radius
//! `min_i raw_max[i]` cannot raise any maximum and are skipped after a norm
//! check; for Gaussian streams almost every point takes that path.

use std::sync::Arc;

use crate::error::{param, Result};
use crate::geometry::{
    hausdorff_intervals, hausdorff_profiles, DirectionGrid, Hull2d, Interval, Point2,
    SupportProfile, Target,
};
use crate::normalizers::Normalizer;

// Relative margin on the skip test; covers rounding in the inner products.
const SKIP_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct TrackerState {
    grid: Arc<DirectionGrid>,
    raw_max: Vec<f64>,
    n: u64,
    min1d: f64,
    max1d: f64,
    hull2d: Option<Hull2d>,
    // Squared radius of a ball on which no maximum can change; 0 when unknown.
    skip_radius_sq: f64,
}

impl TrackerState {
    pub fn new(grid: Arc<DirectionGrid>, track_hull2d: bool) -> Result<Self> {
        if track_hull2d && grid.dim() != 2 {
            return Err(param(
                "exact hull tracking is only available in two dimensions",
            ));
        }
        Ok(Self {
            raw_max: vec![f64::NEG_INFINITY; grid.len()],
            grid,
            n: 0,
            min1d: f64::INFINITY,
            max1d: f64::NEG_INFINITY,
            hull2d: track_hull2d.then(Hull2d::new),
            skip_radius_sq: 0.0,
        })
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn raw_max(&self) -> &[f64] {
        &self.raw_max
    }

    pub fn hull2d(&self) -> Option<&Hull2d> {
        self.hull2d.as_ref()
    }

    /// Un-normalized `[min, max]` in one dimension.
    pub fn raw_interval(&self) -> Option<Interval> {
        (self.grid.dim() == 1 && self.n > 0)
            .then(|| Interval::new(self.min1d, self.max1d).ok())
            .flatten()
    }

    /// Heap memory held by the state; independent of `n`.
    pub fn heap_bytes(&self) -> usize {
        self.raw_max.capacity() * std::mem::size_of::<f64>()
            + self.hull2d.as_ref().map_or(0, Hull2d::heap_bytes)
    }

    pub fn update(&mut self, x: &[f64]) {
        assert_eq!(
            x.len(),
            self.grid.dim(),
            "point dimension does not match the grid"
        );
        self.n += 1;
        match x.len() {
            1 => {
                let v = x[0];
                self.min1d = self.min1d.min(v);
                self.max1d = self.max1d.max(v);
                self.raw_max[0] = self.max1d;
                self.raw_max[1] = -self.min1d;
            }
            d => {
                if d == 2 {
                    if let Some(h) = self.hull2d.as_mut() {
                        h.insert([x[0], x[1]]);
                    }
                }
                let r2: f64 = x.iter().map(|c| c * c).sum();
                if r2 < self.skip_radius_sq {
                    return;
                }
                let changed = if d == 2 {
                    self.update_planar(x)
                } else {
                    self.update_general(x)
                };
                if changed {
                    let inner = self.raw_max.iter().copied().fold(f64::INFINITY, f64::min);
                    self.skip_radius_sq = if inner > 0.0 {
                        inner * inner * (1.0 - SKIP_MARGIN)
                    } else {
                        0.0
                    };
                }
            }
        }
    }

    #[inline]
    fn update_planar(&mut self, x: &[f64]) -> bool {
        let (cx, cy) = (&self.grid.columns()[0], &self.grid.columns()[1]);
        let (x0, x1) = (x[0], x[1]);
        let mut changed = false;
        for ((m, c0), c1) in self.raw_max.iter_mut().zip(cx).zip(cy) {
            // Same summation order as `DirectionGrid::dot`.
            let v = x0 * c0 + x1 * c1;
            if v > *m {
                *m = v;
                changed = true;
            }
        }
        changed
    }

    fn update_general(&mut self, x: &[f64]) -> bool {
        let mut changed = false;
        for i in 0..self.raw_max.len() {
            let v = self.grid.dot(i, x);
            if v > self.raw_max[i] {
                self.raw_max[i] = v;
                changed = true;
            }
        }
        changed
    }

    pub fn extend<'a, I: IntoIterator<Item = &'a [f64]>>(&mut self, points: I) {
        for p in points {
            self.update(p);
        }
    }

    /// Hull normalized by `g(n)` at the current count.
    pub fn snapshot(&self, g: &Normalizer) -> Result<HullSnapshot> {
        self.snapshot_at(g, self.n as f64)
    }

    /// Hull normalized by `g(t)`.
    pub fn snapshot_at(&self, g: &Normalizer, t: f64) -> Result<HullSnapshot> {
        if self.n == 0 {
            return Err(param("snapshot of an empty tracker"));
        }
        let scale = g.eval(t)?;
        let values = self.raw_max.iter().map(|v| v / scale).collect();
        let profile = SupportProfile::new(Arc::clone(&self.grid), values)?;
        let interval = if self.grid.dim() == 1 {
            Some(Interval::new(self.min1d / scale, self.max1d / scale)?)
        } else {
            None
        };
        let vertices = self.hull2d.as_ref().map(|h| {
            h.vertices()
                .iter()
                .map(|v| [v[0] / scale, v[1] / scale])
                .collect()
        });
        Ok(HullSnapshot {
            n: self.n,
            scale,
            profile,
            interval,
            vertices,
        })
    }
}

/// Immutable normalized view of a tracker at one checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct HullSnapshot {
    pub n: u64,
    /// The normalizer value `g(n)` the raw maxima were divided by.
    pub scale: f64,
    pub profile: SupportProfile,
    /// Normalized `[min, max]` in one dimension.
    pub interval: Option<Interval>,
    /// Normalized exact hull vertices when 2-D tracking is enabled.
    pub vertices: Option<Vec<Point2>>,
}

/// Target with its support profile precomputed for one grid.
#[derive(Clone, Debug)]
pub struct GridTarget {
    target: Target,
    interval: Option<Interval>,
    profile: SupportProfile,
}

impl GridTarget {
    pub fn new(target: Target, grid: &Arc<DirectionGrid>) -> Result<Self> {
        if target.dim() != grid.dim() {
            return Err(param(format!(
                "target dimension {} does not match grid dimension {}",
                target.dim(),
                grid.dim()
            )));
        }
        let profile = target.profile(grid)?;
        Ok(Self {
            interval: target.as_interval(),
            target,
            profile,
        })
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn profile(&self) -> &SupportProfile {
        &self.profile
    }

    /// Exact interval distance in one dimension, grid Hausdorff distance otherwise.
    pub fn distance(&self, snap: &HullSnapshot) -> Result<f64> {
        match (&snap.interval, &self.interval) {
            (Some(a), Some(b)) => Ok(hausdorff_intervals(a, b)),
            _ => hausdorff_profiles(&snap.profile, &self.profile),
        }
    }
}

/// Distance from a normalized hull to a target set.
pub fn distance_to_target(snap: &HullSnapshot, target: &Target) -> Result<f64> {
    GridTarget::new(target.clone(), snap.profile.grid())?.distance(snap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_direction_grid, profile_of_points, Ellipsoid};
    use crate::rng::PathRng;

    fn grid(d: usize, m: usize) -> Arc<DirectionGrid> {
        Arc::new(make_direction_grid(d, m).unwrap())
    }

    #[test]
    fn origin_only() {
        let mut t = TrackerState::new(grid(2, 32), false).unwrap();
        t.update(&[0.0, 0.0]);
        assert!(t.raw_max().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn one_dimensional_extremes() {
        let mut t = TrackerState::new(grid(1, 2), false).unwrap();
        for x in [0.5, -2.0, 1.5] {
            t.update(&[x]);
        }
        assert_eq!(t.raw_interval().unwrap(), Interval::new(-2.0, 1.5).unwrap());
        assert_eq!(t.raw_max(), &[1.5, 2.0]);
    }

    #[test]
    fn streamed_profile_equals_batch_profile() {
        let g = grid(2, 512);
        let mut rng = PathRng::from_seed(3);
        let pts: Vec<[f64; 2]> = (0..10_000)
            .map(|_| [rng.standard_normal(), 3.0 * rng.standard_normal()])
            .collect();
        let mut t = TrackerState::new(Arc::clone(&g), false).unwrap();
        for p in &pts {
            t.update(p);
        }
        let batch = profile_of_points(&pts, &g).unwrap();
        assert_eq!(t.raw_max(), batch.values());
    }

    #[test]
    fn three_dimensional_stream_matches_batch() {
        let g = grid(3, 300);
        let mut rng = PathRng::from_seed(4);
        let pts: Vec<[f64; 3]> = (0..3000)
            .map(|_| {
                [
                    rng.standard_normal(),
                    rng.standard_normal(),
                    rng.standard_normal(),
                ]
            })
            .collect();
        let mut t = TrackerState::new(Arc::clone(&g), false).unwrap();
        t.extend(pts.iter().map(|p| &p[..]));
        assert_eq!(t.raw_max(), profile_of_points(&pts, &g).unwrap().values());
    }

    #[test]
    fn snapshot_normalization() {
        let b = Normalizer::B;
        let n = 1000u64;
        let bn = b.eval(n as f64).unwrap();
        let mut t = TrackerState::new(grid(1, 2), false).unwrap();
        t.update(&[-bn]);
        t.update(&[bn]);
        for _ in 2..n {
            t.update(&[0.0]);
        }
        let snap = t.snapshot(&b).unwrap();
        assert_eq!(snap.interval.unwrap(), Interval::new(-1.0, 1.0).unwrap());

        let one = Normalizer::Constant { value: 1.0 };
        assert_eq!(t.snapshot(&one).unwrap().profile.values(), t.raw_max());
    }

    #[test]
    fn snapshot_domain_error_propagates() {
        let mut t = TrackerState::new(grid(1, 2), false).unwrap();
        t.update(&[1.0]);
        t.update(&[2.0]);
        assert!(matches!(
            t.snapshot(&Normalizer::B),
            Err(crate::Error::Domain(_))
        ));
        assert!(TrackerState::new(grid(1, 2), false)
            .unwrap()
            .snapshot(&Normalizer::C)
            .is_err());
    }

    #[test]
    fn distances() {
        let g = grid(1, 2);
        let mut t = TrackerState::new(Arc::clone(&g), false).unwrap();
        t.update(&[-0.9]);
        t.update(&[0.8]);
        let snap = t.snapshot(&Normalizer::Constant { value: 1.0 }).unwrap();
        let target = Target::Interval(Interval::new(-1.0, 1.0).unwrap());
        assert!((distance_to_target(&snap, &target).unwrap() - 0.2).abs() < 1e-15);

        let g2 = grid(2, 64);
        let e = Ellipsoid::diagonal(&[4.0, 1.0]).unwrap();
        let snap = HullSnapshot {
            n: 1,
            scale: 1.0,
            profile: e.profile(&g2).unwrap(),
            interval: None,
            vertices: None,
        };
        assert_eq!(
            distance_to_target(&snap, &Target::Ellipsoid(e)).unwrap(),
            0.0
        );
        assert!(distance_to_target(&snap, &target).is_err());
    }

    #[test]
    fn exact_hull_is_optional_and_planar() {
        assert!(TrackerState::new(grid(3, 10), true).is_err());
        let mut t = TrackerState::new(grid(2, 8), true).unwrap();
        for p in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.1, 0.1]] {
            t.update(&p);
        }
        assert_eq!(t.hull2d().unwrap().vertices().len(), 3);
    }

    #[test]
    fn memory_is_independent_of_stream_length() {
        let g = grid(2, 512);
        let mut t = TrackerState::new(g, false).unwrap();
        let mut rng = PathRng::from_seed(8);
        t.update(&[rng.standard_normal(), rng.standard_normal()]);
        let before = t.heap_bytes();
        for _ in 0..100_000 {
            t.update(&[rng.standard_normal(), rng.standard_normal()]);
        }
        assert_eq!(t.heap_bytes(), before);
        assert_eq!(before, 512 * 8);
    }
}
