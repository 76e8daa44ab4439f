//! Corruption strategies behind a common trait, registered by name.
//!
//! A strategy plans one round at a time: given the round index and the
//! history of past (action, observed reward) pairs it returns a sealed
//! [`RoundCorruption`] — a declared sup-magnitude plus a pure rule mapping
//! any action to a corruption value in `[-1, 1]`. The declared magnitude is
//! what the ledger accounts; the contract `|c_t(x)| <= declared` is
//! property-tested rather than computed by maximizing over the set.
//!
//! Budgeted strategies spend their budget in declared magnitude per round
//! and go quiet once it is exhausted.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::linalg::dot;

use super::EnvError;

/// One past round as strategies are allowed to see it: the submitted point,
/// which vertex it was (if any), and the observed (corrupted) reward.
/// Realized noise and actual rewards are never exposed.
#[derive(Debug, Clone)]
pub struct HistoryRecord {
    pub t: u64,
    pub point: Vec<f64>,
    pub vertex_index: Option<usize>,
    pub observed: f64,
}

/// Append-only view of the game so far.
#[derive(Debug, Default)]
pub struct History {
    records: Vec<HistoryRecord>,
}

impl History {
    pub fn push(&mut self, record: HistoryRecord) {
        debug_assert!(record.t > self.last_round());
        self.records.push(record);
    }

    pub fn records(&self) -> &[HistoryRecord] {
        &self.records
    }

    pub fn last_round(&self) -> u64 {
        self.records.last().map_or(0, |r| r.t)
    }
}

/// A sealed per-round corruption: the declared sup-magnitude the ledger
/// records, and the rule answering `c_t(x)` for any action.
#[derive(Debug, Clone)]
pub struct RoundCorruption {
    pub declared_magnitude: f64,
    pub rule: CorruptionRule,
}

impl RoundCorruption {
    pub fn zero() -> Self {
        Self {
            declared_magnitude: 0.0,
            rule: CorruptionRule::Zero,
        }
    }
}

/// The deterministic corruption functions the built-in strategies emit.
/// Values are clamped to `[-1, 1]` by construction.
#[derive(Debug, Clone)]
pub enum CorruptionRule {
    Zero,
    /// `c(x) = clamp(-2 <x, theta>)`: flips the sign of the expected reward.
    ExpectedSignFlip {
        theta: Vec<f64>,
    },
    /// Point masses: `c(x) = delta_i` when `x` matches point `i` (within
    /// `1e-9`), else 0.
    PointDeltas {
        deltas: Vec<(Vec<f64>, f64)>,
    },
    /// `c(x) = -clamp(gain * <x, v> / ||v||^2)`: drags estimates away from
    /// the direction of `v`.
    AlignedDrag {
        direction: Vec<f64>,
        gain: f64,
    },
}

impl CorruptionRule {
    /// Evaluate the sealed corruption at an action. Pure: repeated queries
    /// with the same `x` return the same value.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        match self {
            CorruptionRule::Zero => 0.0,
            CorruptionRule::ExpectedSignFlip { theta } => (-2.0 * dot(x, theta)).clamp(-1.0, 1.0),
            CorruptionRule::PointDeltas { deltas } => {
                for (p, delta) in deltas {
                    let dist2: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                    if dist2.sqrt() <= 1e-9 {
                        return delta.clamp(-1.0, 1.0);
                    }
                }
                0.0
            }
            CorruptionRule::AlignedDrag { direction, gain } => {
                let len2 = dot(direction, direction).max(1e-300);
                -(gain * dot(x, direction) / len2).clamp(-1.0, 1.0)
            }
        }
    }
}

/// An adversary plans each round from the history, sealed before the
/// learner's action is revealed.
pub trait CorruptionStrategy: Send {
    fn name(&self) -> &'static str;

    /// Whether the harness must maintain a history for this strategy.
    fn needs_history(&self) -> bool {
        false
    }

    fn plan_round(&mut self, t: u64, history: &History) -> RoundCorruption;
}

/// What the adversary knows about the instance at construction time. The
/// adversary is omniscient about the environment; the learner is not.
#[derive(Debug, Clone, Copy)]
pub struct AdversaryView<'a> {
    pub theta: &'a [f64],
    pub vertices: &'a [Vec<f64>],
    pub x_star: usize,
    pub second_best: usize,
}

/// Strategy selection embedded in experiment configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorruptionConfig {
    pub name: String,
    /// Total corruption budget `C` (declared magnitudes sum to at most this).
    #[serde(default)]
    pub budget: f64,
    /// Vertex index boosted by `target_vertex`; defaults to the second-best
    /// vertex.
    #[serde(default)]
    pub target_index: Option<usize>,
    /// Gain of `adaptive_gap_mask`'s drag rule.
    #[serde(default = "default_gain")]
    pub gain: f64,
}

fn default_gain() -> f64 {
    1.0
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        Self {
            name: "none".into(),
            budget: 0.0,
            target_index: None,
            gain: default_gain(),
        }
    }
}

struct NoCorruption;

impl CorruptionStrategy for NoCorruption {
    fn name(&self) -> &'static str {
        "none"
    }

    fn plan_round(&mut self, _t: u64, _history: &History) -> RoundCorruption {
        RoundCorruption::zero()
    }
}

#[cfg(test)]
pub(super) fn none_strategy() -> Box<dyn CorruptionStrategy> {
    Box::new(NoCorruption)
}

/// Flips the sign of every expected reward for the first `k` rounds,
/// declaring magnitude 1 per corrupted round (so `C = k`).
struct FirstKFlip {
    k: u64,
    theta: Vec<f64>,
}

impl CorruptionStrategy for FirstKFlip {
    fn name(&self) -> &'static str {
        "first_k_flip"
    }

    fn plan_round(&mut self, t: u64, _history: &History) -> RoundCorruption {
        if t <= self.k {
            RoundCorruption {
                declared_magnitude: 1.0,
                rule: CorruptionRule::ExpectedSignFlip {
                    theta: self.theta.clone(),
                },
            }
        } else {
            RoundCorruption::zero()
        }
    }
}

/// Adds +1 to observations at a chosen suboptimal vertex and -1 at the
/// optimum while the budget lasts.
struct TargetVertex {
    target: Vec<f64>,
    optimum: Vec<f64>,
    budget: f64,
    spent: f64,
}

impl CorruptionStrategy for TargetVertex {
    fn name(&self) -> &'static str {
        "target_vertex"
    }

    fn plan_round(&mut self, _t: u64, _history: &History) -> RoundCorruption {
        if self.spent + 1.0 <= self.budget + 1e-9 {
            self.spent += 1.0;
            RoundCorruption {
                declared_magnitude: 1.0,
                rule: CorruptionRule::PointDeltas {
                    deltas: vec![(self.target.clone(), 1.0), (self.optimum.clone(), -1.0)],
                },
            }
        } else {
            RoundCorruption::zero()
        }
    }
}

/// Re-planned every round: drags all observations against the direction of
/// the current empirical-best vertex, making it look worse. Falls back to
/// the true optimum before any vertex has been pulled.
struct AdaptiveGapMask {
    vertices: Vec<Vec<f64>>,
    fallback: usize,
    gain: f64,
    budget: f64,
    spent: f64,
    // Running per-vertex statistics over the append-only history; `consumed`
    // marks how many records have been folded in so far.
    sums: Vec<f64>,
    counts: Vec<u64>,
    consumed: usize,
}

impl AdaptiveGapMask {
    fn empirical_best(&mut self, history: &History) -> usize {
        let records = history.records();
        debug_assert!(
            records.len() >= self.consumed,
            "history must be append-only"
        );
        for r in &records[self.consumed..] {
            if let Some(i) = r.vertex_index {
                self.sums[i] += r.observed;
                self.counts[i] += 1;
            }
        }
        self.consumed = records.len();
        let mut best = None::<(usize, f64)>;
        for i in 0..self.vertices.len() {
            if self.counts[i] == 0 {
                continue;
            }
            let mean = self.sums[i] / self.counts[i] as f64;
            match best {
                Some((_, bm)) if mean <= bm + 1e-12 => {}
                _ => best = Some((i, mean)),
            }
        }
        best.map_or(self.fallback, |(i, _)| i)
    }
}

impl CorruptionStrategy for AdaptiveGapMask {
    fn name(&self) -> &'static str {
        "adaptive_gap_mask"
    }

    fn needs_history(&self) -> bool {
        true
    }

    fn plan_round(&mut self, _t: u64, history: &History) -> RoundCorruption {
        if self.spent + 1e-12 >= self.budget {
            return RoundCorruption::zero();
        }
        let target = self.empirical_best(history);
        let rule = CorruptionRule::AlignedDrag {
            direction: self.vertices[target].clone(),
            gain: self.gain,
        };
        // Declared magnitude: the rule is linear in x up to clamping, so its
        // sup over the polytope is attained at a vertex.
        let declared = self
            .vertices
            .iter()
            .map(|v| rule.value_at(v).abs())
            .fold(0.0f64, f64::max);
        if declared > 1e-12 && self.spent + declared <= self.budget + 1e-9 {
            self.spent += declared;
            RoundCorruption {
                declared_magnitude: declared,
                rule,
            }
        } else {
            RoundCorruption::zero()
        }
    }
}

type Builder =
    fn(&CorruptionConfig, &AdversaryView) -> Result<Box<dyn CorruptionStrategy>, EnvError>;

/// Name-indexed registry of corruption strategies.
pub struct CorruptionRegistry {
    builders: BTreeMap<&'static str, Builder>,
}

impl CorruptionRegistry {
    /// Registry with the built-in strategies: `none`, `first_k_flip`,
    /// `target_vertex`, `adaptive_gap_mask`.
    pub fn with_builtins() -> Self {
        let mut r = Self {
            builders: BTreeMap::new(),
        };
        r.register("none", |_cfg, _view| Ok(Box::new(NoCorruption)));
        r.register("first_k_flip", |cfg, view| {
            if cfg.budget < 0.0 {
                return Err(EnvError::InvalidParameter(
                    "corruption.budget must be nonnegative".into(),
                ));
            }
            Ok(Box::new(FirstKFlip {
                k: cfg.budget.floor() as u64,
                theta: view.theta.to_vec(),
            }))
        });
        r.register("target_vertex", |cfg, view| {
            let target_idx = cfg.target_index.unwrap_or(view.second_best);
            let target = view
                .vertices
                .get(target_idx)
                .ok_or_else(|| {
                    EnvError::InvalidParameter(format!(
                        "corruption.target_index {target_idx} out of range"
                    ))
                })?
                .clone();
            Ok(Box::new(TargetVertex {
                target,
                optimum: view.vertices[view.x_star].clone(),
                budget: cfg.budget,
                spent: 0.0,
            }))
        });
        r.register("adaptive_gap_mask", |cfg, view| {
            if cfg.gain <= 0.0 {
                return Err(EnvError::InvalidParameter(
                    "corruption.gain must be positive".into(),
                ));
            }
            let n = view.vertices.len();
            Ok(Box::new(AdaptiveGapMask {
                vertices: view.vertices.to_vec(),
                fallback: view.x_star,
                gain: cfg.gain,
                budget: cfg.budget,
                spent: 0.0,
                sums: vec![0.0; n],
                counts: vec![0; n],
                consumed: 0,
            }))
        });
        r
    }

    pub fn register(&mut self, name: &'static str, builder: Builder) {
        self.builders.insert(name, builder);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    pub fn build(
        &self,
        cfg: &CorruptionConfig,
        view: &AdversaryView,
    ) -> Result<Box<dyn CorruptionStrategy>, EnvError> {
        let builder = self
            .builders
            .get(cfg.name.as_str())
            .ok_or_else(|| EnvError::UnknownStrategy(cfg.name.clone()))?;
        builder(cfg, view)
    }
}
