//! Seeded Gaussian sequence generators with exact covariance oracles.
//!
//! | kind              | `X_n`                                   | `Cov(X_m, X_n)` along a unit `θ`   |
//! |-------------------|-----------------------------------------|------------------------------------|
//! | `iid`             | `N(0, Σ)`                               | `1{m=n} θᵀΣθ`                      |
//! | `scaled-iid`      | `σ_n · N(0, Σ)`, `σ_n = 1 + a n^{-β}`   | `1{m=n} σ_m σ_n θᵀΣθ`              |
//! | `ar1`             | `φ X_{n-1} + sqrt(1-φ²) ξ_n`, stationary| `φ^{|m-n|}`                        |
//! | `normalized-walk` | `S_n / sqrt(n)`                         | `sqrt(min(m,n) / max(m,n))`        |
//! | `polytope-lines`  | `ζ a_K`, `P(K = k) = p_k`               | `1{m=n} Σ_k p_k ⟨a_k, θ⟩²`         |
//!
//! `ar1` and `normalized-walk` act coordinatewise with independent coordinates.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::geometry::{Direction, Ellipsoid, Polytope, Target};
use crate::rng::PathRng;

/// Deterministic marginal scale `σ_n = 1 + amplitude · n^{-exponent}`; tends to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaSchedule {
    pub amplitude: f64,
    pub exponent: f64,
}

impl Default for SigmaSchedule {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            exponent: 0.5,
        }
    }
}

impl SigmaSchedule {
    pub fn sigma(&self, n: u64) -> f64 {
        1.0 + self.amplitude * (n as f64).powf(-self.exponent)
    }

    /// `sup_n σ_n`.
    pub fn sup(&self) -> f64 {
        self.sigma(1).max(1.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.amplitude > -1.0 && self.amplitude.is_finite()) {
            return Err(param(
                "schedule amplitude must be finite and > -1 so that sigma_n > 0",
            ));
        }
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(param(
                "schedule exponent must be positive so that sigma_n -> 1",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceSpec {
    Iid {
        covariance: Ellipsoid,
    },
    ScaledIid {
        covariance: Ellipsoid,
        schedule: SigmaSchedule,
    },
    Ar1 {
        phi: f64,
        dim: usize,
    },
    NormalizedWalk {
        dim: usize,
    },
    PolytopeLines {
        directions: Vec<Vec<f64>>,
        probs: Vec<f64>,
    },
}

impl SequenceSpec {
    pub fn iid(covariance: Ellipsoid) -> Self {
        Self::Iid { covariance }
    }

    /// One-dimensional `N(0, variance)` draws.
    pub fn iid_scalar(variance: f64) -> Result<Self> {
        Ok(Self::Iid {
            covariance: Ellipsoid::new(1, vec![variance])?,
        })
    }

    pub fn ar1(phi: f64) -> Self {
        Self::Ar1 { phi, dim: 1 }
    }

    pub fn walk() -> Self {
        Self::NormalizedWalk { dim: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceSpec::Iid { .. } => Ok(()),
            SequenceSpec::ScaledIid { schedule, .. } => schedule.validate(),
            SequenceSpec::Ar1 { phi, dim } => {
                if !(phi.abs() < 1.0) {
                    return Err(param(format!(
                        "ar1 coefficient must satisfy |phi| < 1, got {phi}"
                    )));
                }
                check_dim(*dim)
            }
            SequenceSpec::NormalizedWalk { dim } => check_dim(*dim),
            SequenceSpec::PolytopeLines { directions, probs } => {
                if directions.is_empty() {
                    return Err(param("polytope-lines needs at least one direction"));
                }
                if directions.len() != probs.len() {
                    return Err(param(format!(
                        "polytope-lines has {} directions but {} probabilities",
                        directions.len(),
                        probs.len()
                    )));
                }
                let dim = directions[0].len();
                check_dim(dim)?;
                for a in directions {
                    if a.len() != dim {
                        return Err(param(
                            "polytope-lines directions have inconsistent dimensions",
                        ));
                    }
                    if !a.iter().all(|c| c.is_finite()) || a.iter().all(|c| *c == 0.0) {
                        return Err(param(
                            "polytope-lines directions must be finite and nonzero",
                        ));
                    }
                }
                if probs.iter().any(|p| !(*p > 0.0)) {
                    return Err(param("polytope-lines probabilities must be positive"));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(param(format!(
                        "polytope-lines probabilities sum to {total}, not 1"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SequenceSpec::Iid { covariance } | SequenceSpec::ScaledIid { covariance, .. } => {
                covariance.dim()
            }
            SequenceSpec::Ar1 { dim, .. } | SequenceSpec::NormalizedWalk { dim } => *dim,
            SequenceSpec::PolytopeLines { directions, .. } => {
                directions.first().map_or(0, Vec::len)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SequenceSpec::Iid { .. } => "iid",
            SequenceSpec::ScaledIid { .. } => "scaled-iid",
            SequenceSpec::Ar1 { .. } => "ar1",
            SequenceSpec::NormalizedWalk { .. } => "normalized-walk",
            SequenceSpec::PolytopeLines { .. } => "polytope-lines",
        }
    }

    /// Limit set of the normalized hulls.
    ///
    /// The concentration ellipsoid of the limiting marginal for the Gaussian
    /// kinds, and `conv{±a_k}` for `polytope-lines`. For `normalized-walk`
    /// this is the unit ball, which is the limit under the `c` normalizer;
    /// under `b` the walk's hulls shrink to the origin instead.
    pub fn hull_limit(&self) -> Result<Target> {
        self.validate()?;
        Ok(match self {
            SequenceSpec::Iid { covariance } | SequenceSpec::ScaledIid { covariance, .. } => {
                Target::Ellipsoid(covariance.clone())
            }
            SequenceSpec::Ar1 { dim, .. } | SequenceSpec::NormalizedWalk { dim } => {
                Target::Ellipsoid(Ellipsoid::identity(*dim))
            }
            SequenceSpec::PolytopeLines { directions, .. } => {
                Target::Polytope(Polytope::symmetric(directions)?)
            }
        })
    }

    /// `limsup_n` of the marginal standard deviation along the worst direction.
    pub fn limiting_marginal_std(&self) -> f64 {
        match self {
            SequenceSpec::Iid { covariance } | SequenceSpec::ScaledIid { covariance, .. } => {
                max_eigenvalue(covariance).max(0.0).sqrt()
            }
            SequenceSpec::Ar1 { .. } | SequenceSpec::NormalizedWalk { .. } => 1.0,
            SequenceSpec::PolytopeLines { directions, .. } => directions
                .iter()
                .map(|a| a.iter().map(|c| c * c).sum::<f64>().sqrt())
                .fold(0.0, f64::max),
        }
    }

    /// Starts a path from `path_seed`.
    pub fn spawn(&self, path_seed: u64) -> Result<PathState> {
        self.validate()?;
        let dim = self.dim();
        let kind = match self {
            SequenceSpec::Iid { covariance } => StateKind::Iid {
                factor: factor(covariance),
            },
            SequenceSpec::ScaledIid {
                covariance,
                schedule,
            } => StateKind::ScaledIid {
                factor: factor(covariance),
                schedule: *schedule,
            },
            SequenceSpec::Ar1 { phi, .. } => StateKind::Ar1 {
                phi: *phi,
                innovation: (1.0 - phi * phi).sqrt(),
                prev: vec![0.0; dim],
            },
            SequenceSpec::NormalizedWalk { .. } => StateKind::Walk {
                sum: vec![0.0; dim],
            },
            SequenceSpec::PolytopeLines { directions, probs } => {
                let mut acc = 0.0;
                let mut cumulative: Vec<f64> = probs
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                *cumulative.last_mut().expect("validated nonempty") = f64::INFINITY;
                StateKind::Lines {
                    directions: directions.clone(),
                    cumulative,
                }
            }
        };
        Ok(PathState {
            kind,
            rng: PathRng::from_seed(path_seed),
            dim,
            index: 0,
            scratch: vec![0.0; dim],
        })
    }

    /// Exact `Cov(X_m, X_n)` for scalar sequences and for the coordinatewise
    /// kinds (`ar1`, `normalized-walk`) in any dimension.
    pub fn rho(&self, m: u64, n: u64) -> Result<f64> {
        self.validate()?;
        let scalar = self.dim() == 1;
        match self {
            SequenceSpec::Ar1 { .. } | SequenceSpec::NormalizedWalk { .. } => {}
            _ if !scalar => {
                return Err(param(format!(
                    "rho is direction-dependent for {} in dimension {}; use rho_along",
                    self.kind_name(),
                    self.dim()
                )))
            }
            _ => {}
        }
        let e1 = Direction::new(
            std::iter::once(1.0)
                .chain(std::iter::repeat(0.0))
                .take(self.dim())
                .collect(),
        )?;
        self.rho_along(&e1, m, n)
    }

    /// Exact `E⟨X_m, θ⟩⟨X_n, θ⟩`.
    pub fn rho_along(&self, theta: &Direction, m: u64, n: u64) -> Result<f64> {
        self.validate()?;
        if m == 0 || n == 0 {
            return Err(param("sequence indices start at 1"));
        }
        if theta.dim() != self.dim() {
            return Err(param("direction dimension does not match the sequence"));
        }
        let th = theta.coords();
        let same = m == n;
        Ok(match self {
            SequenceSpec::Iid { covariance } => {
                if same {
                    covariance.quadratic_form(th)
                } else {
                    0.0
                }
            }
            SequenceSpec::ScaledIid {
                covariance,
                schedule,
            } => {
                if same {
                    schedule.sigma(m) * schedule.sigma(n) * covariance.quadratic_form(th)
                } else {
                    0.0
                }
            }
            SequenceSpec::Ar1 { phi, .. } => phi.powi(m.abs_diff(n) as i32),
            SequenceSpec::NormalizedWalk { .. } => (m.min(n) as f64 / m.max(n) as f64).sqrt(),
            SequenceSpec::PolytopeLines { directions, probs } => {
                if same {
                    directions
                        .iter()
                        .zip(probs)
                        .map(|(a, p)| {
                            let dot: f64 = a.iter().zip(th).map(|(x, y)| x * y).sum();
                            p * dot * dot
                        })
                        .sum()
                } else {
                    0.0
                }
            }
        })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(param("sequence dimension must be at least 1"));
    }
    Ok(())
}

fn max_eigenvalue(e: &Ellipsoid) -> f64 {
    let d = e.dim();
    SymmetricEigen::new(DMatrix::from_row_slice(d, d, e.sigma()))
        .eigenvalues
        .max()
}

/// Row-major `L` with `L Lᵀ = Σ`: Cholesky when `Σ` is positive definite,
/// otherwise `V diag(sqrt(max(λ, 0)))` from the eigendecomposition.
fn factor(e: &Ellipsoid) -> Vec<f64> {
    let d = e.dim();
    if d == 1 {
        return vec![e.sigma()[0].max(0.0).sqrt()];
    }
    let m = DMatrix::from_row_slice(d, d, e.sigma());
    let l = match m.clone().cholesky() {
        Some(ch) => ch.l(),
        None => {
            let eig = SymmetricEigen::new(m);
            let scale = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
            eig.eigenvectors * DMatrix::from_diagonal(&scale)
        }
    };
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = l[(i, j)];
        }
    }
    out
}

#[derive(Clone, Debug)]
enum StateKind {
    Iid {
        factor: Vec<f64>,
    },
    ScaledIid {
        factor: Vec<f64>,
        schedule: SigmaSchedule,
    },
    Ar1 {
        phi: f64,
        innovation: f64,
        prev: Vec<f64>,
    },
    Walk {
        sum: Vec<f64>,
    },
    Lines {
        directions: Vec<Vec<f64>>,
        cumulative: Vec<f64>,
    },
}

/// Recurrence state and random stream of one path.
#[derive(Clone, Debug)]
pub struct PathState {
    kind: StateKind,
    rng: PathRng,
    dim: usize,
    index: u64,
    scratch: Vec<f64>,
}

impl PathState {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of elements emitted so far.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.next_into(&mut out);
        out
    }

    /// Writes `X_{index+1}` into `out`.
    pub fn next_into(&mut self, out: &mut [f64]) {
        assert_eq!(out.len(), self.dim, "output buffer dimension mismatch");
        self.index += 1;
        let k = self.index;
        let rng = &mut self.rng;
        match &mut self.kind {
            StateKind::Iid { factor } => {
                correlate(factor, rng, &mut self.scratch, out);
            }
            StateKind::ScaledIid { factor, schedule } => {
                correlate(factor, rng, &mut self.scratch, out);
                let s = schedule.sigma(k);
                out.iter_mut().for_each(|x| *x *= s);
            }
            StateKind::Ar1 {
                phi,
                innovation,
                prev,
            } => {
                for (p, o) in prev.iter_mut().zip(out.iter_mut()) {
                    let z = rng.standard_normal();
                    *p = if k == 1 {
                        z
                    } else {
                        *phi * *p + *innovation * z
                    };
                    *o = *p;
                }
            }
            StateKind::Walk { sum } => {
                let root = (k as f64).sqrt();
                for (s, o) in sum.iter_mut().zip(out.iter_mut()) {
                    *s += rng.standard_normal();
                    *o = *s / root;
                }
            }
            StateKind::Lines {
                directions,
                cumulative,
            } => {
                let u = rng.uniform();
                let cat = cumulative.partition_point(|c| *c <= u);
                let zeta = rng.standard_normal();
                for (o, a) in out.iter_mut().zip(&directions[cat]) {
                    *o = zeta * a;
                }
            }
        }
    }

    pub fn advance(&mut self, steps: u64) {
        let mut buf = vec![0.0; self.dim];
        for _ in 0..steps {
            self.next_into(&mut buf);
        }
    }
}

#[inline]
fn correlate(factor: &[f64], rng: &mut PathRng, z: &mut [f64], out: &mut [f64]) {
    let d = out.len();
    if d == 1 {
        out[0] = factor[0] * rng.standard_normal();
        return;
    }
    z.iter_mut().for_each(|v| *v = rng.standard_normal());
    for (i, o) in out.iter_mut().enumerate() {
        let row = &factor[i * d..(i + 1) * d];
        let mut acc = row[0] * z[0];
        for j in 1..d {
            acc += row[j] * z[j];
        }
        *o = acc;
    }
}

/// Which index pairs the decorrelation diagnostic scans, given a horizon `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairFamily {
    /// All `m < n ≤ N` with `m ≥ N/2` and `n − m ≥ N/2`.
    Separated,
    /// `(m, ratio·m)` for `N/2 ≤ m ≤ N`: gap growing linearly with `m`.
    Proportional { ratio: u64 },
    /// `(m, N·m)` for `N/2 ≤ m ≤ N`: gap-to-index ratio growing with the horizon.
    Diverging,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition2Report {
    pub satisfied: bool,
    pub worst_pair: (u64, u64),
    pub worst_value: f64,
    pub pairs_scanned: usize,
}

/// Scans `|ρ(m, n)|` over the pair family at `horizon` and compares the worst
/// value with `threshold`.
pub fn check_condition2(
    spec: &SequenceSpec,
    threshold: f64,
    horizon: u64,
    family: PairFamily,
) -> Result<Condition2Report> {
    if horizon < 2 {
        return Err(param("decorrelation horizon must be at least 2"));
    }
    let half = horizon.div_ceil(2);
    let pairs: Vec<(u64, u64)> = match family {
        PairFamily::Separated => (half..=horizon)
            .flat_map(|m| ((m + half)..=horizon).map(move |n| (m, n)))
            .collect(),
        PairFamily::Proportional { ratio } => {
            if ratio < 2 {
                return Err(param("proportional pair ratio must be at least 2"));
            }
            (half..=horizon).map(|m| (m, ratio * m)).collect()
        }
        PairFamily::Diverging => (half..=horizon).map(|m| (m, horizon * m)).collect(),
    };
    let mut worst = (0.0f64, (0, 0));
    for &(m, n) in &pairs {
        let r = spec.rho(m, n)?.abs();
        if r > worst.0 || worst.1 == (0, 0) {
            worst = (r, (m, n));
        }
    }
    Ok(Condition2Report {
        satisfied: worst.0 < threshold,
        worst_pair: worst.1,
        worst_value: worst.0,
        pairs_scanned: pairs.len(),
    })
}
