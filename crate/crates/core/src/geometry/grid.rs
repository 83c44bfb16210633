use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Tolerance on the Euclidean norm of a [`Direction`].
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A unit vector in `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps `coords`, rejecting vectors whose norm is not 1 within [`UNIT_TOLERANCE`].
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(param("direction must have at least one coordinate"));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(param(format!("direction norm {norm} is not 1")));
        }
        Ok(Self(coords))
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(coords: &[f64]) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(param("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self(coords.iter().map(|c| c / norm).collect()))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    AxisPair1d,
    Equiangular2d,
    FibonacciSphere,
}

/// A fixed, ordered set of unit directions on which support functions are sampled.
///
/// Coordinates are stored column-wise (`columns[j][i]` is coordinate `j` of
/// direction `i`) so the per-point update loops run over contiguous memory.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionGrid {
    kind: GridKind,
    dim: usize,
    columns: Vec<Vec<f64>>,
}

/// Builds the deterministic direction grid for dimension `d` with `m` directions.
///
/// `d = 1` always yields `{+1, -1}`. `d = 2` yields `m` equiangular directions
/// starting at angle 0. `d >= 3` yields `m` spiral (Fibonacci) points; above
/// three dimensions the spiral is replaced by normalized draws from a fixed seed.
pub fn make_direction_grid(d: usize, m: usize) -> Result<DirectionGrid> {
    if d == 0 {
        return Err(param("grid dimension must be at least 1"));
    }
    if m < 2 {
        return Err(param(format!("grid needs at least 2 directions, got {m}")));
    }
    let (kind, dirs): (GridKind, Vec<Vec<f64>>) = match d {
        1 => (GridKind::AxisPair1d, vec![vec![1.0], vec![-1.0]]),
        2 => (
            GridKind::Equiangular2d,
            (0..m)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / m as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect(),
        ),
        3 => (GridKind::FibonacciSphere, fibonacci_sphere(m)),
        _ => (GridKind::FibonacciSphere, seeded_sphere(d, m)),
    };
    let mut columns = vec![Vec::with_capacity(dirs.len()); d];
    for dir in &dirs {
        for (col, c) in columns.iter_mut().zip(dir) {
            col.push(*c);
        }
    }
    Ok(DirectionGrid {
        kind,
        dim: d,
        columns,
    })
}

fn fibonacci_sphere(m: usize) -> Vec<Vec<f64>> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
            let r = (1.0 - y * y).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            normalize(vec![r * phi.cos(), y, r * phi.sin()])
        })
        .collect()
}

fn seeded_sphere(d: usize, m: usize) -> Vec<Vec<f64>> {
    let mut rng = crate::rng::PathRng::from_seed(0x5EED_D1EC);
    (0..m)
        .map(|_| normalize((0..d).map(|_| rng.standard_normal()).collect()))
        .collect()
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= norm);
    v
}

impl DirectionGrid {
    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn direction(&self, i: usize) -> Direction {
        Direction(self.columns.iter().map(|col| col[i]).collect())
    }

    pub fn directions(&self) -> impl Iterator<Item = Direction> + '_ {
        (0..self.len()).map(|i| self.direction(i))
    }

    /// Inner product of direction `i` with `x`, summed in coordinate order.
    ///
    /// Every support computation in the crate goes through this summation
    /// order, which is what makes streamed and batch profiles bit-identical.
    #[inline]
    pub fn dot(&self, i: usize, x: &[f64]) -> f64 {
        let mut acc = x[0] * self.columns[0][i];
        for (xj, col) in x[1..self.dim].iter().zip(&self.columns[1..]) {
            acc += xj * col[i];
        }
        acc
    }

    /// Two grids are interchangeable when they were built from the same parameters.
    pub fn same_as(&self, other: &DirectionGrid) -> bool {
        std::ptr::eq(self, other)
            || (self.kind == other.kind && self.dim == other.dim && self.len() == other.len())
    }
}
