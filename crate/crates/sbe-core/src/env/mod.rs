//! Reward environments: linear rewards with sub-Gaussian noise, adversarial
//! corruption under a seal-before-reveal protocol, and budget accounting.
//!
//! The round protocol is strict: the corruption function for round `t` is
//! sealed (fixed) before the learner's action is revealed. Strategies may
//! read the full history of past actions and observed rewards, never the
//! current action or realized noise. `Environment` enforces the ordering and
//! rejects out-of-protocol calls.
//!
//! An environment instance is owned by exactly one run; distinct runs with
//! distinct RNG streams may execute in parallel.

mod corruption;
mod instance;
mod ledger;

pub use corruption::{
    AdversaryView, CorruptionConfig, CorruptionRegistry, CorruptionRule, CorruptionStrategy,
    History, HistoryRecord, RoundCorruption,
};
pub use instance::{make_instance, vertex_gap, BuiltInstance, InstanceConfig};
pub use ledger::CorruptionLedger;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::geometry::{GeometryError, Polytope, GEOM_TOL};
use crate::linalg::{dot, norm};

/// Errors from environment construction and the round protocol.
#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("action lies outside the decision set")]
    ActionOutsideDecisionSet,
    #[error("epoch boundary out of range: {0}")]
    BoundaryOutOfRange(String),
    #[error("instance generator exhausted after {retries} retries")]
    GeneratorExhausted { retries: u32 },
    #[error("unknown corruption strategy: {0}")]
    UnknownStrategy(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Noise attached to each reward draw. All kinds have mean zero and
/// variance proxy at most 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Standard normal (variance proxy exactly 1).
    #[default]
    GaussianStd,
    /// Uniform on `[-1, 1]` (bounded, hence proxy at most 1).
    UniformPm1,
    /// No noise; useful for deterministic replays.
    None,
}

/// Hidden linear reward model `r_t(x) = <x, theta> + eta_t`.
#[derive(Debug, Clone)]
pub struct LinearRewardModel {
    theta: Vec<f64>,
    noise: NoiseKind,
}

impl LinearRewardModel {
    /// Requires `||theta||_2 <= 1`.
    pub fn new(theta: Vec<f64>, noise: NoiseKind) -> Result<Self, EnvError> {
        let n = norm(&theta);
        if n > 1.0 + GEOM_TOL {
            return Err(EnvError::InvalidParameter(format!(
                "theta norm {n} exceeds 1"
            )));
        }
        Ok(Self { theta, noise })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn noise_kind(&self) -> NoiseKind {
        self.noise
    }

    fn draw_noise(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.noise {
            NoiseKind::GaussianStd => StandardNormal.sample(rng),
            NoiseKind::UniformPm1 => {
                use rand::Rng;
                rng.random_range(-1.0..=1.0)
            }
            NoiseKind::None => 0.0,
        }
    }
}

/// What one round produced. The learner only ever sees `observed_reward`;
/// `actual_reward` is harness-side (the player "finally receives" it, but no
/// decision may depend on it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub actual_reward: f64,
    pub observed_reward: f64,
    pub corruption_applied: f64,
}

/// A reward environment bound to one run: hidden model, corruption strategy,
/// and the ledger of declared magnitudes.
pub struct Environment {
    polytope: Arc<Polytope>,
    model: LinearRewardModel,
    strategy: Box<dyn CorruptionStrategy>,
    ledger: CorruptionLedger,
    sealed: Option<(u64, RoundCorruption)>,
    next_t: u64,
    rng: ChaCha8Rng,
}

impl Environment {
    pub fn new(
        polytope: Arc<Polytope>,
        model: LinearRewardModel,
        strategy: Box<dyn CorruptionStrategy>,
        rng: ChaCha8Rng,
    ) -> Self {
        Self {
            polytope,
            model,
            strategy,
            ledger: CorruptionLedger::default(),
            sealed: None,
            next_t: 1,
            rng,
        }
    }

    /// Whether the corruption strategy wants the action/observation history.
    pub fn needs_history(&self) -> bool {
        self.strategy.needs_history()
    }

    /// Seal the corruption function for round `t` before the action is
    /// revealed. `history` must contain only rounds before `t`.
    pub fn begin_round(&mut self, t: u64, history: &History) -> Result<(), EnvError> {
        if self.sealed.is_some() {
            return Err(EnvError::ProtocolViolation(format!(
                "round {t} sealed while a previous round is still open"
            )));
        }
        if t != self.next_t {
            return Err(EnvError::ProtocolViolation(format!(
                "expected round {}, got {t}",
                self.next_t
            )));
        }
        if history.last_round() >= t {
            return Err(EnvError::ProtocolViolation(format!(
                "history contains round {} >= current round {t}",
                history.last_round()
            )));
        }
        let plan = self.strategy.plan_round(t, history);
        self.sealed = Some((t, plan));
        Ok(())
    }

    /// The sealed corruption rule for the open round, if any. Exposed for
    /// property tests that probe `|c_t(x)| <= declared magnitude`.
    pub fn sealed_plan(&self) -> Option<&RoundCorruption> {
        self.sealed.as_ref().map(|(_, p)| p)
    }

    /// Reveal the action for round `t` and observe the corrupted reward.
    ///
    /// Draws fresh noise, applies the sealed corruption, and appends the
    /// declared magnitude to the ledger. Consumes the seal.
    pub fn observe(&mut self, t: u64, x: &[f64]) -> Result<StepOutcome, EnvError> {
        let Some((sealed_t, plan)) = self.sealed.take() else {
            return Err(EnvError::ProtocolViolation(format!(
                "observe({t}) before the round was sealed"
            )));
        };
        if sealed_t != t {
            self.sealed = Some((sealed_t, plan));
            return Err(EnvError::ProtocolViolation(format!(
                "observe({t}) does not match sealed round {sealed_t}"
            )));
        }
        if !self.polytope.contains(x, GEOM_TOL) {
            self.sealed = Some((sealed_t, plan));
            return Err(EnvError::ActionOutsideDecisionSet);
        }
        let eta = self.model.draw_noise(&mut self.rng);
        let actual = dot(x, &self.model.theta) + eta;
        let corruption = plan.rule.value_at(x);
        debug_assert!(corruption.abs() <= plan.declared_magnitude + 1e-12);
        self.ledger.push(t, plan.declared_magnitude);
        self.next_t = t + 1;
        Ok(StepOutcome {
            actual_reward: actual,
            observed_reward: actual + corruption,
            corruption_applied: corruption,
        })
    }

    pub fn ledger(&self) -> &CorruptionLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> CorruptionLedger {
        self.ledger
    }
}
