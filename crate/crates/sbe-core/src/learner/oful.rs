//! Optimism-in-the-face-of-uncertainty baseline over the vertex set.
//!
//! Ridge regression on all observations with a self-normalized confidence
//! width; picks the vertex maximizing `<x, theta_ridge> + w ||x||_{V^{-1}}`.
//! Exists for qualitative contrast with the corruption-robust learner, so
//! the width constants are the standard ones, nothing more.

use std::sync::Arc;

use crate::geometry::Polytope;
use crate::linalg::{chol_solve, cholesky, dot};

use super::{AlgorithmConfig, Choice, Learner, LearnerContext, LearnerError};

/// Ridge statistics: `V = lambda I + sum x x^T` and the moment vector.
#[derive(Debug, Clone)]
struct RidgeState {
    gram: Vec<f64>,
    moment: Vec<f64>,
    observations: u64,
}

pub struct OfulLearner {
    lambda: f64,
    delta: f64,
    polytope: Arc<Polytope>,
    state: RidgeState,
}

impl OfulLearner {
    pub fn new(cfg: &AlgorithmConfig, ctx: &LearnerContext) -> Result<Self, LearnerError> {
        if cfg.lambda <= 0.0 || cfg.lambda.is_nan() {
            return Err(LearnerError::InvalidParameter(
                "lambda must be positive".into(),
            ));
        }
        if cfg.delta <= 0.0 || cfg.delta >= 1.0 || cfg.delta.is_nan() {
            return Err(LearnerError::InvalidParameter(format!(
                "delta {} outside (0, 1)",
                cfg.delta
            )));
        }
        let d = ctx.polytope.dim();
        let mut gram = vec![0.0; d * d];
        for i in 0..d {
            gram[i * d + i] = cfg.lambda;
        }
        Ok(Self {
            lambda: cfg.lambda,
            delta: cfg.delta,
            polytope: ctx.polytope.clone(),
            state: RidgeState {
                gram,
                moment: vec![0.0; d],
                observations: 0,
            },
        })
    }

    /// Confidence width after `t` observations:
    /// `sqrt(d log((1 + t/lambda) / delta)) + sqrt(lambda)`.
    pub fn width(&self, t: u64) -> f64 {
        let d = self.polytope.dim() as f64;
        (d * ((1.0 + t as f64 / self.lambda) / self.delta).ln()).sqrt() + self.lambda.sqrt()
    }

    /// Current ridge estimate `V^{-1} moment`.
    pub fn theta_ridge(&self) -> Result<Vec<f64>, LearnerError> {
        let d = self.polytope.dim();
        let l = cholesky(&self.state.gram, d).ok_or(LearnerError::SingularGram)?;
        Ok(chol_solve(&l, d, &self.state.moment))
    }
}

impl Learner for OfulLearner {
    fn name(&self) -> &'static str {
        "oful"
    }

    fn choose(&mut self, _t: u64) -> Result<Choice, LearnerError> {
        let d = self.polytope.dim();
        let l = cholesky(&self.state.gram, d).ok_or(LearnerError::SingularGram)?;
        let theta = chol_solve(&l, d, &self.state.moment);
        let w = self.width(self.state.observations);
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (i, v) in self.polytope.vertices().iter().enumerate() {
            let vinv = chol_solve(&l, d, v);
            let score = dot(v, &theta) + w * dot(v, &vinv).max(0.0).sqrt();
            if score > best_score + 1e-12 {
                best = i;
                best_score = score;
            }
        }
        Ok(Choice::Vertex(best))
    }

    fn record(&mut self, _t: u64, choice: &Choice, observed: f64) {
        let Choice::Vertex(i) = choice else { return };
        let x = &self.polytope.vertices()[*i];
        let d = x.len();
        for a in 0..d {
            for b in 0..d {
                self.state.gram[a * d + b] += x[a] * x[b];
            }
        }
        for (m, xi) in self.state.moment.iter_mut().zip(x) {
            *m += observed * xi;
        }
        self.state.observations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::test_support::box_context;

    fn learner() -> OfulLearner {
        let ctx = box_context(0.7, 1000, 3);
        let cfg = AlgorithmConfig {
            name: "oful".into(),
            lambda: 1.0,
            delta: 0.1,
            ..Default::default()
        };
        OfulLearner::new(&cfg, &ctx).unwrap()
    }

    #[test]
    fn single_observation_ridge_arithmetic() {
        // lambda = 1, one observation x = (1, 0) with reward 1:
        // V = diag(2, 1), moment = (1, 0), theta = (0.5, 0).
        let ctx = box_context(0.7, 1000, 3);
        let cfg = AlgorithmConfig {
            name: "oful".into(),
            ..Default::default()
        };
        let mut l = OfulLearner::new(&cfg, &ctx).unwrap();
        // Inject the observation directly through the state.
        let d = 2;
        l.state.gram[0] += 1.0;
        let _ = d;
        l.state.moment[0] += 1.0;
        l.state.observations += 1;
        let theta = l.theta_ridge().unwrap();
        assert!((theta[0] - 0.5).abs() < 1e-12);
        assert!(theta[1].abs() < 1e-12);
    }

    #[test]
    fn no_observations_selection_is_width_driven() {
        let mut l = learner();
        let theta = l.theta_ridge().unwrap();
        assert!(theta.iter().all(|&x| x == 0.0));
        // All vertices of the square have equal V^{-1}-norm; lowest index wins.
        assert_eq!(l.choose(1).unwrap(), Choice::Vertex(0));
    }

    #[test]
    fn width_is_monotone_in_t() {
        let l = learner();
        let mut prev = 0.0;
        for t in 0..100 {
            let w = l.width(t);
            assert!(w >= prev);
            prev = w;
        }
    }

    #[test]
    fn converges_to_the_best_vertex_without_noise() {
        let mut l = learner();
        let theta = [0.5, 0.1];
        for t in 1..=400u64 {
            let c = l.choose(t).unwrap();
            let Choice::Vertex(i) = c else { unreachable!() };
            let x = l.polytope.vertices()[i].clone();
            l.record(t, &c, dot(&x, &theta));
        }
        // After plenty of noiseless pulls the optimistic pick is x*.
        assert_eq!(l.choose(401).unwrap(), Choice::Vertex(3));
    }
}
