//! Problem-instance construction: a decision polytope plus a hidden vector
//! with a known optimum and gap.
//!
//! Instances are fixed by `instance_seed`, independently of the per-run
//! seeds, so sweeps across budgets and replications see the same problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::sync::Arc;

use crate::geometry::{
    family_polytope, polytope_from_json, random_linear_image, Family, GeometryError, Polytope,
};
use crate::linalg::{dot, norm};

use super::{EnvError, NoiseKind};

const THETA_RETRIES: u32 = 1000;

/// Instance selection embedded in experiment configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceConfig {
    /// One of `box`, `cross_polytope`, `regular_simplex`, `random_box`,
    /// `random_cross_polytope`, `random_simplex`, or `file`.
    pub family: String,
    #[serde(default = "default_dim")]
    pub d: usize,
    /// Family size parameter (box half-width, cross-polytope radius, simplex
    /// circumradius). Defaults to the largest size fitting the unit ball.
    #[serde(default)]
    pub scale: Option<f64>,
    /// Polytope JSON path when `family = "file"`.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Explicit hidden vector; drawn at random when absent.
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    /// Minimum accepted gap between the best and second-best vertices.
    #[serde(default = "default_delta_floor")]
    pub delta_floor: f64,
    #[serde(default)]
    pub noise: NoiseKind,
    /// Seed for the instance itself (random families and random theta).
    #[serde(default)]
    pub instance_seed: u64,
}

fn default_dim() -> usize {
    2
}

fn default_delta_floor() -> f64 {
    0.05
}

/// A fully resolved problem instance. `x_star`, `second_best`, and `delta`
/// are harness-side knowledge; learners never see them.
#[derive(Debug, Clone)]
pub struct BuiltInstance {
    pub polytope: Arc<Polytope>,
    pub theta: Vec<f64>,
    pub x_star: usize,
    pub second_best: usize,
    pub delta: f64,
    pub noise: NoiseKind,
}

/// Best and second-best vertices under `theta` with their score gap.
/// Ties break to the lowest index; the second best may tie the best.
pub fn vertex_gap(polytope: &Polytope, theta: &[f64]) -> (usize, usize, f64) {
    let scores: Vec<f64> = polytope.vertices().iter().map(|v| dot(v, theta)).collect();
    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] + 1e-15 {
            best = i;
        }
    }
    let mut second = usize::MAX;
    for (i, &s) in scores.iter().enumerate() {
        if i == best {
            continue;
        }
        if second == usize::MAX || s > scores[second] + 1e-15 {
            second = i;
        }
    }
    (best, second, scores[best] - scores[second])
}

fn build_polytope(cfg: &InstanceConfig, rng: &mut ChaCha8Rng) -> Result<Polytope, EnvError> {
    let named = |size: f64| -> Result<Family, EnvError> {
        Ok(match cfg.family.as_str() {
            "box" | "random_box" => Family::Box { half_width: size },
            "cross_polytope" | "random_cross_polytope" => Family::CrossPolytope { radius: size },
            "regular_simplex" | "random_simplex" => Family::RegularSimplex { circumradius: size },
            other => return Err(GeometryError::UnsupportedFamily(other.into()).into()),
        })
    };
    match cfg.family.as_str() {
        "file" => {
            let path = cfg.path.as_ref().ok_or_else(|| {
                EnvError::InvalidParameter("instance.path required for family \"file\"".into())
            })?;
            let text = std::fs::read_to_string(path).map_err(|e| {
                EnvError::InvalidParameter(format!("instance.path {}: {e}", path.display()))
            })?;
            Ok(polytope_from_json(&text)?)
        }
        "box" | "cross_polytope" | "regular_simplex" => {
            let probe = named(1.0)?;
            let size = cfg.scale.unwrap_or_else(|| probe.unit_ball_size(cfg.d));
            Ok(family_polytope(named(size)?, cfg.d)?)
        }
        "random_box" | "random_cross_polytope" | "random_simplex" => {
            let target = cfg.scale.unwrap_or(0.95).min(1.0);
            Ok(random_linear_image(named(1.0)?, cfg.d, target, rng)?)
        }
        other => Err(GeometryError::UnsupportedFamily(other.into()).into()),
    }
}

/// Build the polytope and resolve a hidden vector whose best vertex is
/// unique with gap at least `delta_floor`.
///
/// With an explicit `theta` the gap is checked once; otherwise random unit
/// directions are drawn (and rescaled below norm 1) until one clears the
/// floor, failing with `GeneratorExhausted` after a bounded number of tries.
pub fn make_instance(cfg: &InstanceConfig) -> Result<BuiltInstance, EnvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.instance_seed);
    rng.set_stream(2);
    let polytope = Arc::new(build_polytope(cfg, &mut rng)?);
    if let Some(theta) = &cfg.theta {
        if theta.len() != polytope.dim() {
            return Err(EnvError::InvalidParameter(format!(
                "instance.theta length {} does not match d = {}",
                theta.len(),
                polytope.dim()
            )));
        }
        if norm(theta) > 1.0 + 1e-9 {
            return Err(EnvError::InvalidParameter(
                "instance.theta must have norm at most 1".into(),
            ));
        }
        let (best, second, delta) = vertex_gap(&polytope, theta);
        if delta < cfg.delta_floor {
            return Err(EnvError::GeneratorExhausted { retries: 0 });
        }
        return Ok(BuiltInstance {
            polytope,
            theta: theta.clone(),
            x_star: best,
            second_best: second,
            delta,
            noise: cfg.noise,
        });
    }
    for retry in 0..THETA_RETRIES {
        let mut theta: Vec<f64> = (0..polytope.dim())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let n = norm(&theta);
        if n < 1e-12 {
            continue;
        }
        let len = rng.random_range(0.5..1.0);
        theta.iter_mut().for_each(|x| *x *= len / n);
        let (best, second, delta) = vertex_gap(&polytope, &theta);
        if delta >= cfg.delta_floor {
            let _ = retry;
            return Ok(BuiltInstance {
                polytope,
                theta,
                x_star: best,
                second_best: second,
                delta,
                noise: cfg.noise,
            });
        }
    }
    Err(EnvError::GeneratorExhausted {
        retries: THETA_RETRIES,
    })
}
