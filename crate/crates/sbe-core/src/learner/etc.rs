//! Explore-then-commit baseline.
//!
//! Pulls every vertex round-robin for a fixed budget, then commits to the
//! empirically best vertex forever. Deliberately naive: an adversary that
//! poisons the exploration phase owns the commitment, which is exactly the
//! failure mode this baseline exists to demonstrate.

use std::sync::Arc;

use crate::geometry::Polytope;

use super::{AlgorithmConfig, Choice, Learner, LearnerContext, LearnerError};

pub struct EtcLearner {
    polytope: Arc<Polytope>,
    explore_len: u64,
    sums: Vec<f64>,
    counts: Vec<u64>,
    committed: Option<usize>,
}

impl EtcLearner {
    pub fn new(cfg: &AlgorithmConfig, ctx: &LearnerContext) -> Result<Self, LearnerError> {
        let n = ctx.polytope.vertices().len();
        let explore_len = cfg
            .explore_rounds_per_vertex
            .checked_mul(n as u64)
            .ok_or_else(|| LearnerError::InvalidParameter("exploration budget overflow".into()))?;
        Ok(Self {
            polytope: ctx.polytope.clone(),
            explore_len,
            sums: vec![0.0; n],
            counts: vec![0; n],
            committed: None,
        })
    }

    /// Rounds spent exploring before the commitment.
    pub fn exploration_length(&self) -> u64 {
        self.explore_len
    }

    fn empirical_best(&self) -> usize {
        let mut best = 0usize;
        let mut best_mean = f64::NEG_INFINITY;
        for i in 0..self.sums.len() {
            let mean = if self.counts[i] == 0 {
                0.0
            } else {
                self.sums[i] / self.counts[i] as f64
            };
            if mean > best_mean + 1e-15 {
                best = i;
                best_mean = mean;
            }
        }
        best
    }
}

impl Learner for EtcLearner {
    fn name(&self) -> &'static str {
        "etc"
    }

    fn choose(&mut self, t: u64) -> Result<Choice, LearnerError> {
        if t <= self.explore_len {
            let n = self.polytope.vertices().len() as u64;
            return Ok(Choice::Vertex(((t - 1) % n) as usize));
        }
        if self.committed.is_none() {
            self.committed = Some(self.empirical_best());
        }
        Ok(Choice::Vertex(self.committed.unwrap()))
    }

    fn record(&mut self, t: u64, choice: &Choice, observed: f64) {
        if t > self.explore_len {
            return;
        }
        if let Choice::Vertex(i) = choice {
            self.sums[*i] += observed;
            self.counts[*i] += 1;
        }
    }
}
