use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::grid::{Direction, DirectionGrid};
use crate::error::{domain, param, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-12;
const PSD_TOLERANCE: f64 = 1e-10;

/// Support function of a convex compact sampled on a [`DirectionGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SupportProfile {
    grid: Arc<DirectionGrid>,
    values: Vec<f64>,
}

impl SupportProfile {
    pub fn new(grid: Arc<DirectionGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(param(format!(
                "profile has {} values for a grid of {} directions",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("support values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Profile of `{λx : x ∈ A}` for `λ > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Grid distance from a point to the body: `max(0, max_i ⟨x,θ_i⟩ − h(θ_i))`.
    ///
    /// Exact in one dimension; a lower bound on the Euclidean distance otherwise.
    pub fn point_excess(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.grid.dim(), x.len())?;
        Ok(self
            .values
            .iter()
            .enumerate()
            .map(|(i, h)| self.grid.dot(i, x) - h)
            .fold(0.0, f64::max))
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(param(format!(
            "dimension mismatch: expected {expected}, got {got}"
        )));
    }
    Ok(())
}

/// Support profile of a finite point set: the per-direction maximum of `⟨x, θ⟩`.
pub fn profile_of_points<P: AsRef<[f64]>>(
    points: &[P],
    grid: &Arc<DirectionGrid>,
) -> Result<SupportProfile> {
    if points.is_empty() {
        return Err(domain("support of an empty point set is undefined"));
    }
    for p in points {
        check_dim(grid.dim(), p.as_ref().len())?;
    }
    let values = (0..grid.len())
        .map(|i| {
            points
                .iter()
                .map(|p| grid.dot(i, p.as_ref()))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    SupportProfile::new(Arc::clone(grid), values)
}

/// Grid Hausdorff distance: `max_i |p_i − q_i|` over a shared grid.
///
/// For convex bodies this never exceeds the true Hausdorff distance; it is exact
/// in one dimension.
pub fn hausdorff_profiles(p: &SupportProfile, q: &SupportProfile) -> Result<f64> {
    if !p.grid.same_as(&q.grid) {
        return Err(param("profiles are sampled on different grids"));
    }
    Ok(p.values
        .iter()
        .zip(&q.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Concentration ellipsoid `{Σ^{1/2} u : |u| ≤ 1}` of a centered Gaussian with covariance `Σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EllipsoidRepr", into = "EllipsoidRepr")]
pub struct Ellipsoid {
    dim: usize,
    sigma: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct EllipsoidRepr {
    dim: usize,
    sigma: Vec<f64>,
}

impl TryFrom<EllipsoidRepr> for Ellipsoid {
    type Error = crate::Error;
    fn try_from(r: EllipsoidRepr) -> Result<Self> {
        Ellipsoid::new(r.dim, r.sigma)
    }
}

impl From<Ellipsoid> for EllipsoidRepr {
    fn from(e: Ellipsoid) -> Self {
        Self {
            dim: e.dim,
            sigma: e.sigma,
        }
    }
}

impl Ellipsoid {
    /// `sigma` is the row-major `dim × dim` covariance matrix. It must be
    /// symmetric and positive semidefinite up to tolerance; singular matrices
    /// are accepted.
    pub fn new(dim: usize, sigma: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(param("ellipsoid dimension must be at least 1"));
        }
        if sigma.len() != dim * dim {
            return Err(param(format!(
                "covariance needs {} entries for dimension {dim}, got {}",
                dim * dim,
                sigma.len()
            )));
        }
        if sigma.iter().any(|s| !s.is_finite()) {
            return Err(domain("covariance entries must be finite"));
        }
        for i in 0..dim {
            for j in 0..i {
                if (sigma[i * dim + j] - sigma[j * dim + i]).abs() > SYMMETRY_TOLERANCE {
                    return Err(domain(format!("covariance is not symmetric at ({i}, {j})")));
                }
            }
        }
        let min_eig = SymmetricEigen::new(DMatrix::from_row_slice(dim, dim, &sigma))
            .eigenvalues
            .min();
        if min_eig < -PSD_TOLERANCE {
            return Err(domain(format!(
                "covariance is not positive semidefinite (eigenvalue {min_eig})"
            )));
        }
        Ok(Self { dim, sigma })
    }

    pub fn identity(dim: usize) -> Self {
        Self::isotropic(dim, 1.0)
    }

    /// `σ² I`.
    pub fn isotropic(dim: usize, variance: f64) -> Self {
        let mut sigma = vec![0.0; dim * dim];
        for i in 0..dim {
            sigma[i * dim + i] = variance;
        }
        Self { dim, sigma }
    }

    pub fn diagonal(variances: &[f64]) -> Result<Self> {
        let dim = variances.len();
        let mut sigma = vec![0.0; dim * dim];
        for (i, v) in variances.iter().enumerate() {
            sigma[i * dim + i] = *v;
        }
        Self::new(dim, sigma)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major covariance entries.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `θᵀΣθ` for an arbitrary vector.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += v[i] * self.sigma[i * d + j] * v[j];
            }
        }
        acc
    }

    fn support_unchecked(&self, v: &[f64]) -> f64 {
        self.quadratic_form(v).max(0.0).sqrt()
    }

    pub fn profile(&self, grid: &Arc<DirectionGrid>) -> Result<SupportProfile> {
        check_dim(self.dim, grid.dim())?;
        let values = grid
            .directions()
            .map(|d| self.support_unchecked(d.coords()))
            .collect();
        SupportProfile::new(Arc::clone(grid), values)
    }
}

/// `h_E(θ) = sqrt(max(θᵀΣθ, 0))`.
pub fn ellipsoid_support(e: &Ellipsoid, theta: &Direction) -> Result<f64> {
    check_dim(e.dim, theta.dim())?;
    Ok(e.support_unchecked(theta.coords()))
}

/// Convex hull of a finite vertex list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeRepr", into = "PolytopeRepr")]
pub struct Polytope {
    vertices: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    vertices: Vec<Vec<f64>>,
}

impl TryFrom<PolytopeRepr> for Polytope {
    type Error = crate::Error;
    fn try_from(r: PolytopeRepr) -> Result<Self> {
        Polytope::new(r.vertices)
    }
}

impl From<Polytope> for PolytopeRepr {
    fn from(p: Polytope) -> Self {
        Self {
            vertices: p.vertices,
        }
    }
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| param("polytope needs at least one vertex"))?;
        let dim = first.len();
        if dim == 0 {
            return Err(param("polytope vertices must have at least one coordinate"));
        }
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(param("polytope vertices have inconsistent dimensions"));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(domain("polytope vertices must be finite"));
        }
        Ok(Self { vertices })
    }

    /// The centrally symmetric polytope `conv{±a_1, …, ±a_m}`.
    pub fn symmetric(generators: &[Vec<f64>]) -> Result<Self> {
        let vertices = generators
            .iter()
            .flat_map(|a| [a.clone(), a.iter().map(|c| -c).collect()])
            .collect();
        Self::new(vertices)
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn profile(&self, grid: &Arc<DirectionGrid>) -> Result<SupportProfile> {
        profile_of_points(&self.vertices, grid)
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalRepr", into = "IntervalRepr")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: f64,
    hi: f64,
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = crate::Error;
    fn try_from(r: IntervalRepr) -> Result<Self> {
        Interval::new(r.lo, r.hi)
    }
}

impl From<Interval> for IntervalRepr {
    fn from(i: Interval) -> Self {
        Self { lo: i.lo, hi: i.hi }
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(domain("interval endpoints must be finite"));
        }
        if lo > hi {
            return Err(param(format!(
                "interval endpoints out of order: [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// `[-r, r]`.
    pub fn symmetric(r: f64) -> Result<Self> {
        Self::new(-r, r)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Profile on the `{+1, -1}` grid: `(hi, -lo)`.
    pub fn profile(&self, grid: &Arc<DirectionGrid>) -> Result<SupportProfile> {
        check_dim(1, grid.dim())?;
        profile_of_points(&[[self.lo], [self.hi]], grid)
    }
}

/// Hausdorff distance between intervals: `max(|a.lo − b.lo|, |a.hi − b.hi|)`.
pub fn hausdorff_intervals(a: &Interval, b: &Interval) -> f64 {
    (a.lo - b.lo).abs().max((a.hi - b.hi).abs())
}

/// Limit set against which normalized hulls are measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Target {
    Ellipsoid(Ellipsoid),
    Polytope(Polytope),
    Interval(Interval),
}

impl Target {
    pub fn dim(&self) -> usize {
        match self {
            Target::Ellipsoid(e) => e.dim(),
            Target::Polytope(p) => p.dim(),
            Target::Interval(_) => 1,
        }
    }

    pub fn profile(&self, grid: &Arc<DirectionGrid>) -> Result<SupportProfile> {
        match self {
            Target::Ellipsoid(e) => e.profile(grid),
            Target::Polytope(p) => p.profile(grid),
            Target::Interval(i) => i.profile(grid),
        }
    }

    /// One-dimensional targets as intervals; `None` in higher dimension.
    pub fn as_interval(&self) -> Option<Interval> {
        match self {
            Target::Interval(i) => Some(*i),
            Target::Ellipsoid(e) if e.dim() == 1 => {
                Interval::symmetric(e.sigma[0].max(0.0).sqrt()).ok()
            }
            Target::Polytope(p) if p.dim() == 1 => {
                let xs = p.vertices.iter().map(|v| v[0]);
                let lo = xs.clone().fold(f64::INFINITY, f64::min);
                let hi = xs.fold(f64::NEG_INFINITY, f64::max);
                Interval::new(lo, hi).ok()
            }
            _ => None,
        }
    }
}
