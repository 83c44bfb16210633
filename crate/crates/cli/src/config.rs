//! Flat TOML experiment files.
//!
//! One experiment per file, top-level keys only. Matrices and vertex lists are
//! written as arrays of rows. Unknown keys are rejected.

use std::fmt::Display;
use std::path::Path;

use hull_limits::experiments::{default_grid_size, geometric_checkpoints, ExperimentConfig};
use hull_limits::geometry::{Ellipsoid, Interval, Polytope, Target};
use hull_limits::normalizers::Normalizer;
use hull_limits::sequences::{SequenceSpec, SigmaSchedule};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Syntax(String),
    #[error("config key `{key}`: {message}")]
    Key { key: &'static str, message: String },
}

fn key_err(key: &'static str, message: impl Display) -> ConfigError {
    ConfigError::Key {
        key,
        message: message.to_string(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `iid`, `scaled-iid`, `ar1`, `walk` or `polytope-lines`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Covariance rows for `iid` and `scaled-iid`; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,

    /// `limit` (default), `ellipsoid`, `interval`, `polytope` or `origin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_sigma: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_vertices: Option<Vec<Vec<f64>>>,

    /// `b` (default), `c`, `iterated-log`, `constant` or `table`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer_k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer_value: Option<f64>,
    /// `[[t, g], ...]` knots for linear interpolation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer_table: Option<Vec<[f64; 2]>>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_start: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_max: Option<u64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track_hull2d: Option<bool>,
}

pub const DEFAULT_PATHS: usize = 100;
pub const DEFAULT_SEED: u64 = 0;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string().trim_end().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    pub fn spec(&self) -> Result<SequenceSpec, ConfigError> {
        let spec = match self.kind.as_str() {
            "iid" | "scaled-iid" => {
                let covariance = match &self.sigma {
                    Some(rows) => {
                        let d = rows.len();
                        if rows.iter().any(|r| r.len() != d) {
                            return Err(key_err(
                                "sigma",
                                "covariance must be a square array of rows",
                            ));
                        }
                        Ellipsoid::new(d, rows.concat()).map_err(|e| key_err("sigma", e))?
                    }
                    None => Ellipsoid::identity(self.dim.unwrap_or(1)),
                };
                if self.dim.is_some_and(|d| d != covariance.dim()) {
                    return Err(key_err(
                        "sigma",
                        format!(
                            "covariance is {0}x{0} but dim = {1}",
                            covariance.dim(),
                            self.dim.unwrap()
                        ),
                    ));
                }
                if self.kind == "iid" {
                    SequenceSpec::Iid { covariance }
                } else {
                    let default = SigmaSchedule::default();
                    let schedule = SigmaSchedule {
                        amplitude: self.schedule_amplitude.unwrap_or(default.amplitude),
                        exponent: self.schedule_exponent.unwrap_or(default.exponent),
                    };
                    let spec = SequenceSpec::ScaledIid {
                        covariance,
                        schedule,
                    };
                    spec.validate()
                        .map_err(|e| key_err("schedule_exponent", e))?;
                    spec
                }
            }
            "ar1" => {
                let phi = self
                    .phi
                    .ok_or_else(|| key_err("phi", "required for kind = \"ar1\""))?;
                let spec = SequenceSpec::Ar1 {
                    phi,
                    dim: self.dim.unwrap_or(1),
                };
                spec.validate().map_err(|e| key_err("phi", e))?;
                spec
            }
            "walk" | "normalized-walk" => {
                let spec = SequenceSpec::NormalizedWalk {
                    dim: self.dim.unwrap_or(1),
                };
                spec.validate().map_err(|e| key_err("dim", e))?;
                spec
            }
            "polytope-lines" => {
                let directions = self.directions.clone().ok_or_else(|| {
                    key_err("directions", "required for kind = \"polytope-lines\"")
                })?;
                let m = directions.len().max(1);
                let probs = self
                    .probs
                    .clone()
                    .unwrap_or_else(|| vec![1.0 / m as f64; m]);
                let spec = SequenceSpec::PolytopeLines { directions, probs };
                spec.validate().map_err(|e| {
                    let msg = e.to_string();
                    key_err(
                        if msg.contains("probabilit") {
                            "probs"
                        } else {
                            "directions"
                        },
                        msg,
                    )
                })?;
                if self.dim.is_some_and(|d| d != spec.dim()) {
                    return Err(key_err(
                        "dim",
                        format!("directions have dimension {}", spec.dim()),
                    ));
                }
                spec
            }
            other => return Err(key_err(
                "kind",
                format!(
                    "unknown kind {other:?}; expected iid, scaled-iid, ar1, walk or polytope-lines"
                ),
            )),
        };
        Ok(spec)
    }

    pub fn target(&self, spec: &SequenceSpec) -> Result<Target, ConfigError> {
        let dim = spec.dim();
        let target = match self.target.as_deref().unwrap_or("limit") {
            "limit" => spec.hull_limit().map_err(|e| key_err("target", e))?,
            "ellipsoid" => {
                let rows = self
                    .target_sigma
                    .as_ref()
                    .ok_or_else(|| key_err("target_sigma", "required for target = \"ellipsoid\""))?;
                if rows.iter().any(|r| r.len() != rows.len()) {
                    return Err(key_err("target_sigma", "covariance must be a square array of rows"));
                }
                Target::Ellipsoid(Ellipsoid::new(rows.len(), rows.concat()).map_err(|e| key_err("target_sigma", e))?)
            }
            "interval" => {
                let lo = self.target_lo.ok_or_else(|| key_err("target_lo", "required for target = \"interval\""))?;
                let hi = self.target_hi.ok_or_else(|| key_err("target_hi", "required for target = \"interval\""))?;
                Target::Interval(Interval::new(lo, hi).map_err(|e| key_err("target_lo", e))?)
            }
            "polytope" => {
                let vertices = self
                    .target_vertices
                    .clone()
                    .ok_or_else(|| key_err("target_vertices", "required for target = \"polytope\""))?;
                Target::Polytope(Polytope::new(vertices).map_err(|e| key_err("target_vertices", e))?)
            }
            "origin" => {
                if dim == 1 {
                    Target::Interval(Interval::point(0.0))
                } else {
                    Target::Polytope(Polytope::new(vec![vec![0.0; dim]]).map_err(|e| key_err("target", e))?)
                }
            }
            other => {
                return Err(key_err(
                    "target",
                    format!("unknown target {other:?}; expected limit, ellipsoid, interval, polytope or origin"),
                ))
            }
        };
        if target.dim() != dim {
            return Err(key_err(
                "target",
                format!(
                    "target has dimension {} but the sequence has dimension {dim}",
                    target.dim()
                ),
            ));
        }
        Ok(target)
    }

    pub fn normalizer(&self) -> Result<Normalizer, ConfigError> {
        let g = match self.normalizer.as_deref().unwrap_or("b") {
            "b" => Normalizer::B,
            "c" => Normalizer::C,
            "iterated-log" => Normalizer::IteratedLog {
                k: self.normalizer_k.unwrap_or(1),
                alpha: self.normalizer_alpha.unwrap_or(0.5),
            },
            "constant" => Normalizer::Constant {
                value: self.normalizer_value.ok_or_else(|| {
                    key_err("normalizer_value", "required for normalizer = \"constant\"")
                })?,
            },
            "table" => Normalizer::Table {
                knots: self
                    .normalizer_table
                    .as_ref()
                    .ok_or_else(|| {
                        key_err("normalizer_table", "required for normalizer = \"table\"")
                    })?
                    .iter()
                    .map(|k| (k[0], k[1]))
                    .collect(),
            },
            other => return Err(key_err(
                "normalizer",
                format!(
                    "unknown normalizer {other:?}; expected b, c, iterated-log, constant or table"
                ),
            )),
        };
        g.validate().map_err(|e| key_err("normalizer", e))?;
        Ok(g)
    }

    pub fn checkpoints(&self) -> Result<Vec<u64>, ConfigError> {
        let geometric = self.checkpoint_start.is_some()
            || self.checkpoint_ratio.is_some()
            || self.checkpoint_max.is_some();
        match (&self.checkpoints, geometric) {
            (Some(_), true) => Err(key_err(
                "checkpoints",
                "give either checkpoints or checkpoint_start/ratio/max, not both",
            )),
            (Some(list), false) => Ok(list.clone()),
            (None, true) => {
                let max = self.checkpoint_max.ok_or_else(|| {
                    key_err("checkpoint_max", "required for geometric checkpoints")
                })?;
                geometric_checkpoints(
                    self.checkpoint_start.unwrap_or(100),
                    self.checkpoint_ratio.unwrap_or(2.0),
                    max,
                )
                .map_err(|e| key_err("checkpoint_ratio", e))
            }
            (None, false) => Err(key_err(
                "checkpoints",
                "missing; give a list or checkpoint_max",
            )),
        }
    }

    /// Resolves every key into a validated experiment.
    pub fn experiment(&self) -> Result<ExperimentConfig, ConfigError> {
        let spec = self.spec()?;
        let target = self.target(&spec)?;
        let normalizer = self.normalizer()?;
        let checkpoints = self.checkpoints()?;
        let config = ExperimentConfig {
            grid_size: self.grid_m.unwrap_or_else(|| default_grid_size(spec.dim())),
            spec,
            target,
            normalizer,
            checkpoints,
            paths: self.paths.unwrap_or(DEFAULT_PATHS),
            master_seed: self.seed.unwrap_or(DEFAULT_SEED),
            track_hull2d: self.track_hull2d.unwrap_or(false),
        };
        config.validate().map_err(|e| {
            let msg = e.to_string();
            let key = if msg.contains("checkpoint") {
                "checkpoints"
            } else if msg.contains("paths") {
                "paths"
            } else if msg.contains("grid") {
                "grid_m"
            } else if msg.contains("hull tracking") {
                "track_hull2d"
            } else if msg.contains("target") {
                "target"
            } else {
                "kind"
            };
            key_err(key, msg)
        })?;
        Ok(config)
    }

    /// The fully explicit flat form of an experiment.
    pub fn from_experiment(config: &ExperimentConfig) -> Self {
        let mut out = RunConfig {
            kind: config.spec.kind_name().to_string(),
            dim: Some(config.spec.dim()),
            ..Default::default()
        };
        match &config.spec {
            SequenceSpec::Iid { covariance } => out.sigma = Some(rows(covariance)),
            SequenceSpec::ScaledIid {
                covariance,
                schedule,
            } => {
                out.sigma = Some(rows(covariance));
                out.schedule_amplitude = Some(schedule.amplitude);
                out.schedule_exponent = Some(schedule.exponent);
            }
            SequenceSpec::Ar1 { phi, .. } => out.phi = Some(*phi),
            SequenceSpec::NormalizedWalk { .. } => {}
            SequenceSpec::PolytopeLines { directions, probs } => {
                out.directions = Some(directions.clone());
                out.probs = Some(probs.clone());
            }
        }
        match &config.target {
            Target::Ellipsoid(e) => {
                out.target = Some("ellipsoid".into());
                out.target_sigma = Some(rows(e));
            }
            Target::Interval(i) => {
                out.target = Some("interval".into());
                out.target_lo = Some(i.lo());
                out.target_hi = Some(i.hi());
            }
            Target::Polytope(p) => {
                out.target = Some("polytope".into());
                out.target_vertices = Some(p.vertices().to_vec());
            }
        }
        match &config.normalizer {
            Normalizer::B => out.normalizer = Some("b".into()),
            Normalizer::C => out.normalizer = Some("c".into()),
            Normalizer::IteratedLog { k, alpha } => {
                out.normalizer = Some("iterated-log".into());
                out.normalizer_k = Some(*k);
                out.normalizer_alpha = Some(*alpha);
            }
            Normalizer::Constant { value } => {
                out.normalizer = Some("constant".into());
                out.normalizer_value = Some(*value);
            }
            Normalizer::Table { knots } => {
                out.normalizer = Some("table".into());
                out.normalizer_table = Some(knots.iter().map(|&(t, g)| [t, g]).collect());
            }
        }
        out.checkpoints = Some(config.checkpoints.clone());
        out.paths = Some(config.paths);
        out.seed = Some(config.master_seed);
        out.grid_m = Some(config.grid_size);
        out.track_hull2d = Some(config.track_hull2d);
        out
    }
}

fn rows(e: &Ellipsoid) -> Vec<Vec<f64>> {
    e.sigma().chunks(e.dim()).map(<[f64]>::to_vec).collect()
}
