//! The support-basis-exploration learner.
//!
//! Runs in epochs of geometrically growing length. Within epoch `m` each
//! round is a Bernoulli(`gamma_{m-1}`) coin flip between exploring a
//! uniformly chosen basis axis and exploiting the best vertex under the
//! previous epoch's estimate. At the epoch's end the per-axis reward sums,
//! divided by the EXPECTED exploration count (not the realized one), yield
//! coordinate estimates `b_j` and hence `theta_hat`; the gap estimate is
//! floored at `2^{-m}` and drives the next epoch's exploration ratio.
//!
//! Decisions in epoch `m` depend only on epoch `m-1`'s estimate, which is
//! what limits how long early corruption can bite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::geometry::{ExplorationBasis, Polytope};
use crate::linalg::dot;

use super::schedule::{default_zeta, exploration_ratio, next_schedule, EpochSchedule};
use super::{AlgorithmConfig, Choice, EpochRecord, Learner, LearnerContext, LearnerError};

/// Per-axis accumulation for one epoch.
#[derive(Debug, Clone)]
pub struct EpochTally {
    axis_sums: Vec<f64>,
    realized: Vec<u64>,
    expected_per_axis: f64,
}

impl EpochTally {
    pub fn new(d: usize, expected_per_axis: f64) -> Self {
        Self {
            axis_sums: vec![0.0; d],
            realized: vec![0; d],
            expected_per_axis,
        }
    }

    /// Accumulate one exploration observation on axis `j`.
    pub fn record(&mut self, axis: usize, observed: f64) {
        self.axis_sums[axis] += observed;
        self.realized[axis] += 1;
    }

    pub fn axis_sums(&self) -> &[f64] {
        &self.axis_sums
    }

    pub fn realized_counts(&self) -> &[u64] {
        &self.realized
    }

    pub fn expected_per_axis(&self) -> f64 {
        self.expected_per_axis
    }
}

/// End-of-epoch estimate: per-coordinate values and the assembled vector.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub b_hat: Vec<f64>,
    pub theta_hat: Vec<f64>,
    pub m: u32,
}

/// Gap estimate with the best/second-best vertices under `theta_hat`.
#[derive(Debug, Clone)]
pub struct GapEstimate {
    pub delta_hat: f64,
    pub best: usize,
    pub second: usize,
}

/// Close an epoch: `r_j = axis_sum_j / n_e`, `b_j = r_j / ||s_j||^2`,
/// `theta_hat = sum_j b_j s_j`.
///
/// The divisor `n_e` is the expected per-axis exploration count rounded up
/// to an integer; realized counts are diagnostics only. Errors when fewer
/// than one exploration pull per axis is expected (a configuration error).
pub fn close_epoch(
    tally: &EpochTally,
    basis: &ExplorationBasis,
    m: u32,
) -> Result<Estimate, LearnerError> {
    let expected = tally.expected_per_axis;
    if expected < 1.0 {
        return Err(LearnerError::ZeroExpectedCount { expected });
    }
    let n_e = expected.ceil();
    let d = basis.dim();
    let mut b_hat = Vec::with_capacity(d);
    let mut theta_hat = vec![0.0; d];
    for j in 0..d {
        let r_j = tally.axis_sums[j] / n_e;
        let len2 = dot(&basis.axes[j], &basis.axes[j]);
        let b_j = r_j / len2;
        b_hat.push(b_j);
        for (t, s) in theta_hat.iter_mut().zip(&basis.axes[j]) {
            *t += b_j * s;
        }
    }
    Ok(Estimate {
        b_hat,
        theta_hat,
        m,
    })
}

/// Best and second-best vertices under `theta_hat` with the floored gap
/// `max(2^{-m}, best - second)`. Ties break to the lowest index.
pub fn estimate_gap(theta_hat: &[f64], shifted_vertices: &[Vec<f64>], m: u32) -> GapEstimate {
    let scores: Vec<f64> = shifted_vertices.iter().map(|v| dot(v, theta_hat)).collect();
    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] + 1e-15 {
            best = i;
        }
    }
    let mut second = if best == 0 { 1 } else { 0 };
    for (i, &s) in scores.iter().enumerate() {
        if i != best && s > scores[second] + 1e-15 {
            second = i;
        }
    }
    let gap = scores[best] - scores[second];
    GapEstimate {
        delta_hat: gap.max(2f64.powi(-(m as i32))),
        best,
        second,
    }
}

/// Epoch-based learner exploring the inscribed-ellipsoid axes.
pub struct SbeLearner {
    zeta: f64,
    horizon: u64,
    polytope: Arc<Polytope>,
    basis: Arc<ExplorationBasis>,
    shifted_vertices: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
    schedule: EpochSchedule,
    /// `delta_hat^{(m-1)}` while epoch `m` runs.
    delta_hat_prev: f64,
    /// Exploitation target `x_*^{(m-1)}` (vertex index).
    exploit: usize,
    tally: EpochTally,
    records: Vec<EpochRecord>,
    last_recorded: u64,
}

impl SbeLearner {
    pub fn new(cfg: &AlgorithmConfig, ctx: &LearnerContext) -> Result<Self, LearnerError> {
        if cfg.delta <= 0.0 || cfg.delta >= 1.0 || cfg.delta.is_nan() {
            return Err(LearnerError::InvalidParameter(format!(
                "delta {} outside (0, 1)",
                cfg.delta
            )));
        }
        if cfg.zeta_scale <= 0.0 || cfg.zeta_scale.is_nan() {
            return Err(LearnerError::InvalidParameter(
                "zeta_scale must be positive".into(),
            ));
        }
        if ctx.horizon < 2 {
            return Err(LearnerError::InvalidParameter(
                "horizon must be at least 2".into(),
            ));
        }
        let d = ctx.polytope.dim();
        let zeta = default_zeta(d, ctx.horizon, cfg.delta, cfg.mode) * cfg.zeta_scale;
        let schedule = next_schedule(1, 1.0, zeta, d, ctx.horizon, 0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        rng.set_stream(1);
        let shifted_vertices = ctx.basis.shifted_vertices(&ctx.polytope);
        // theta_hat^{(0)} is the zero vector: every vertex ties and the
        // lowest index is exploited through epoch 1.
        let zero = vec![0.0; d];
        let initial = estimate_gap(&zero, &shifted_vertices, 0);
        let tally = EpochTally::new(d, schedule.expected_per_axis);
        Ok(Self {
            zeta,
            horizon: ctx.horizon,
            polytope: ctx.polytope.clone(),
            basis: ctx.basis.clone(),
            shifted_vertices,
            rng,
            schedule,
            delta_hat_prev: 1.0,
            exploit: initial.best,
            tally,
            records: Vec::new(),
            last_recorded: 0,
        })
    }

    /// Resolved zeta (formula value times the configured scale).
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    fn close_current(&mut self) -> Result<(), LearnerError> {
        let m = self.schedule.m;
        let estimate = close_epoch(&self.tally, &self.basis, m)?;
        let gap = estimate_gap(&estimate.theta_hat, &self.shifted_vertices, m);
        let gamma_m = exploration_ratio(m, gap.delta_hat);
        self.records.push(EpochRecord {
            m,
            theta_hat: estimate.theta_hat,
            delta_hat: gap.delta_hat,
            gamma: gamma_m,
            n_m: self.schedule.n_m,
            len: self.schedule.len,
            realized_counts: self.tally.realized.clone(),
        });
        self.delta_hat_prev = gap.delta_hat;
        self.exploit = gap.best;
        Ok(())
    }

    fn open_next(&mut self) -> Result<(), LearnerError> {
        let next_m = self.schedule.m + 1;
        self.schedule = next_schedule(
            next_m,
            self.delta_hat_prev,
            self.zeta,
            self.polytope.dim(),
            self.horizon,
            self.schedule.t_end,
        )?;
        self.tally = EpochTally::new(self.polytope.dim(), self.schedule.expected_per_axis);
        Ok(())
    }
}

impl Learner for SbeLearner {
    fn name(&self) -> &'static str {
        "sbe"
    }

    fn choose(&mut self, t: u64) -> Result<Choice, LearnerError> {
        if t > self.horizon {
            return Err(LearnerError::HorizonExhausted { t });
        }
        if t > self.schedule.t_end {
            self.close_current()?;
            self.open_next()?;
        }
        let d = self.polytope.dim();
        if self.rng.random::<f64>() < self.schedule.gamma_prev {
            Ok(Choice::Explore(self.rng.random_range(0..d)))
        } else {
            Ok(Choice::Vertex(self.exploit))
        }
    }

    fn record(&mut self, t: u64, choice: &Choice, observed: f64) {
        if let Choice::Explore(j) = choice {
            self.tally.record(*j, observed);
        }
        self.last_recorded = t;
    }

    /// Close the trailing epoch when it completed exactly at the horizon;
    /// a horizon-truncated epoch is never re-estimated (no decision depends
    /// on it).
    fn finalize(&mut self) -> Result<(), LearnerError> {
        if !self.schedule.truncated && self.last_recorded == self.schedule.t_end {
            self.close_current()?;
        }
        Ok(())
    }

    fn current_epoch(&self) -> u32 {
        self.schedule.m
    }

    fn epoch_records(&self) -> &[EpochRecord] {
        &self.records
    }
}
