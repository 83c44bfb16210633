//! Normalizing functions for growing hulls.
//!
//! * `b(t) = sqrt(2 ln t)` on `t > e`, the Gaussian-maximum scale;
//! * `c(t) = sqrt(2 ln ln t)` on `t > e^e`, the iterated-logarithm scale;
//! * `(2 ln^{(k)} t)^α` on `ln^{(k)} t > 1`, a family containing both;
//! * constants and user tables for exploratory sweeps.
//!
//! The logarithmic kinds can be evaluated from `ln t` directly so that
//! arguments far beyond `f64::MAX` (for example `t = 2^2000`) are usable.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Normalizer {
    B,
    C,
    IteratedLog {
        k: u32,
        alpha: f64,
    },
    Constant {
        value: f64,
    },
    /// Piecewise-linear interpolation through `(t, g)` knots.
    Table {
        knots: Vec<(f64, f64)>,
    },
}

impl Normalizer {
    pub fn validate(&self) -> Result<()> {
        match self {
            Normalizer::B | Normalizer::C => Ok(()),
            Normalizer::IteratedLog { k, alpha } => {
                if *k == 0 {
                    return Err(param("iterated-log normalizer needs k >= 1"));
                }
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(param(format!(
                        "iterated-log exponent must be positive, got {alpha}"
                    )));
                }
                Ok(())
            }
            Normalizer::Constant { value } => {
                if !(*value > 0.0 && value.is_finite()) {
                    return Err(param(format!(
                        "constant normalizer must be positive, got {value}"
                    )));
                }
                Ok(())
            }
            Normalizer::Table { knots } => {
                if knots.len() < 2 {
                    return Err(param("normalizer table needs at least two knots"));
                }
                if knots
                    .iter()
                    .any(|(t, g)| !t.is_finite() || !(g.is_finite() && *g > 0.0))
                {
                    return Err(param("normalizer table values must be finite and positive"));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(param(
                        "normalizer table abscissae must be strictly increasing",
                    ));
                }
                if knots.windows(2).any(|w| w[1].1 < w[0].1) {
                    return Err(param("normalizer table values must be nondecreasing"));
                }
                Ok(())
            }
        }
    }

    /// Short human-readable name, used in file headers and plots.
    pub fn label(&self) -> String {
        match self {
            Normalizer::B => "b".into(),
            Normalizer::C => "c".into(),
            Normalizer::IteratedLog { k, alpha } => format!("iterated-log(k={k}, alpha={alpha})"),
            Normalizer::Constant { value } => format!("constant({value})"),
            Normalizer::Table { knots } => format!("table({} knots)", knots.len()),
        }
    }

    /// Evaluates the normalizer at `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.validate()?;
        match self {
            Normalizer::B if !(t > E) => Err(domain(format!("b(t) requires t > e, got t = {t}"))),
            Normalizer::Constant { value } => Ok(*value),
            Normalizer::Table { knots } => interpolate(knots, t),
            _ => {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(domain(format!(
                        "{} requires finite t > 0, got t = {t}",
                        self.label()
                    )));
                }
                self.eval_log(t.ln())
            }
        }
    }

    /// Evaluates the normalizer at `t = exp(log_t)`.
    pub fn eval_log(&self, log_t: f64) -> Result<f64> {
        self.validate()?;
        match self {
            Normalizer::B => {
                if !(log_t > 1.0) {
                    return Err(domain(format!("b(t) requires t > e, got ln t = {log_t}")));
                }
                Ok((2.0 * log_t).sqrt())
            }
            Normalizer::C => {
                let ll = if log_t > 0.0 { log_t.ln() } else { f64::NAN };
                if !(ll > 1.0) {
                    return Err(domain(format!("c(t) requires t > e^e, got ln t = {log_t}")));
                }
                Ok((2.0 * ll).sqrt())
            }
            Normalizer::IteratedLog { k, alpha } => {
                let mut v = log_t;
                for _ in 1..*k {
                    if !(v > 0.0) {
                        break;
                    }
                    v = v.ln();
                }
                if !(v > 1.0) {
                    return Err(domain(format!(
                        "{} requires the {k}-fold logarithm of t to exceed 1",
                        self.label()
                    )));
                }
                if *alpha == 0.5 {
                    Ok((2.0 * v).sqrt())
                } else {
                    Ok((2.0 * v).powf(*alpha))
                }
            }
            Normalizer::Constant { value } => Ok(*value),
            Normalizer::Table { .. } => self.eval(log_t.exp()),
        }
    }

    /// Smallest integer index at which the normalizer is defined.
    pub fn min_index(&self) -> u64 {
        match self {
            Normalizer::Table { knots } => knots[0].0.max(1.0).ceil() as u64,
            Normalizer::Constant { .. } => 1,
            Normalizer::B | Normalizer::C | Normalizer::IteratedLog { .. } => {
                let k = match self {
                    Normalizer::B => 1,
                    Normalizer::C => 2,
                    Normalizer::IteratedLog { k, .. } => *k,
                    _ => unreachable!(),
                };
                // Domain boundary is the exponential tower e^e^…^e of height k.
                let boundary = (0..k).fold(1.0f64, |t, _| t.exp());
                if !(boundary < 1e18) {
                    return u64::MAX;
                }
                let mut n = boundary.floor().max(1.0) as u64;
                while self.eval(n as f64).is_err() {
                    n += 1;
                }
                n
            }
        }
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> Result<f64> {
    let (t0, _) = knots[0];
    let (t1, _) = knots[knots.len() - 1];
    if !(t >= t0 && t <= t1) {
        return Err(domain(format!(
            "table normalizer defined on [{t0}, {t1}], got t = {t}"
        )));
    }
    let idx = knots
        .partition_point(|(x, _)| *x <= t)
        .clamp(1, knots.len() - 1);
    let (xa, ya) = knots[idx - 1];
    let (xb, yb) = knots[idx];
    Ok(ya + (yb - ya) * (t - xa) / (xb - xa))
}

/// `b(t) = sqrt(2 ln t)`, `t > e`.
pub fn eval_b(t: f64) -> Result<f64> {
    Normalizer::B.eval(t)
}

/// `c(t) = sqrt(2 ln ln t)`, `t > e^e`.
pub fn eval_c(t: f64) -> Result<f64> {
    Normalizer::C.eval(t)
}

pub fn eval_g(g: &Normalizer, t: f64) -> Result<f64> {
    g.eval(t)
}
