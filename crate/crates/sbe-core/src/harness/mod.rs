//! Experiment orchestration: wiring environments and learners through the
//! round protocol, computing pseudo-regret from the hidden vector, and
//! replicating runs across corruption budgets.
//!
//! Only the harness touches the hidden vector, actual rewards, and the
//! corruption ledger; learners interact exclusively through
//! [`crate::learner::Learner`]. Replications are independent: each run owns
//! its RNG streams derived from its seed, so execution order and parallelism
//! cannot change results.

mod concentration;
mod lemmas;
mod sweep;
mod trace;

pub use concentration::concentration_tolerance;
pub use lemmas::{lemma_checks, EpochLemmaCheck, LemmaReport};
pub use sweep::{sweep, SweepAggregate, SweepCell, SweepResult, SweepRun};
pub use trace::{
    write_epoch_jsonl, write_ledger_csv, write_sweep_csv, write_trace_csv, RegretTrace, StepRow,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::env::{
    AdversaryView, BuiltInstance, CorruptionConfig, CorruptionLedger, CorruptionRegistry, EnvError,
    Environment, History, HistoryRecord, LinearRewardModel,
};
use crate::geometry::{
    exploration_basis, inscribed_ellipsoid, kappa_bound, EllipsoidMode, ExplorationBasis,
    GeometryError, SOLVER_DEFAULT_TOL,
};
use crate::learner::{
    AlgorithmConfig, Choice, EpochRecord, LearnerContext, LearnerError, LearnerRegistry,
};
use crate::linalg::dot;

/// Errors surfaced while preparing or executing runs.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error("certified kappa {kappa:.4} exceeds the mode bound {bound:.4}")]
    CertificateExceeded { kappa: f64, bound: f64 },
    #[error("lemma checks need the corruption ledger")]
    MissingLedger,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Per-run execution switches.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Retain the per-step trace (lean studies switch this off to keep
    /// memory flat over tens of millions of steps).
    pub record_trace: bool,
    /// Stop after this many steps even if the horizon is larger. The
    /// learner still plans against the configured horizon.
    pub max_steps: Option<u64>,
    /// Evaluate the confidence-bound report after the run.
    pub check_lemmas: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            record_trace: true,
            max_steps: None,
            check_lemmas: false,
        }
    }
}

/// Everything a finished run leaves behind.
#[derive(Debug)]
pub struct RunOutput {
    pub trace: RegretTrace,
    pub epoch_records: Vec<EpochRecord>,
    pub ledger: CorruptionLedger,
    pub lemma_report: Option<LemmaReport>,
}

/// Solve the instance's inscribed ellipsoid and derive the exploration
/// basis, enforcing the mode's containment bound on the certificate.
pub fn prepare_basis(
    instance: &BuiltInstance,
    mode: EllipsoidMode,
) -> Result<Arc<ExplorationBasis>, HarnessError> {
    let ce = inscribed_ellipsoid(&instance.polytope, SOLVER_DEFAULT_TOL)?;
    let basis = exploration_basis(&instance.polytope, &ce)?;
    let bound = kappa_bound(mode, instance.polytope.dim());
    if basis.kappa > bound {
        return Err(HarnessError::CertificateExceeded {
            kappa: basis.kappa,
            bound,
        });
    }
    Ok(Arc::new(basis))
}

/// Execute one run: seal corruption, reveal the learner's action, return the
/// observed reward, account the actual one.
///
/// Pseudo-regret is computed harness-side from the TRUE hidden vector; the
/// learner sees observed rewards only.
pub fn run_experiment(
    instance: &BuiltInstance,
    basis: Arc<ExplorationBasis>,
    algorithm: &AlgorithmConfig,
    corruption: &CorruptionConfig,
    horizon: u64,
    seed: u64,
    options: &RunOptions,
) -> Result<RunOutput, HarnessError> {
    let learners = LearnerRegistry::with_builtins();
    let corruptions = CorruptionRegistry::with_builtins();

    let ctx = LearnerContext {
        polytope: instance.polytope.clone(),
        basis: basis.clone(),
        horizon,
        seed,
    };
    let mut learner = learners.build(algorithm, &ctx)?;

    let view = AdversaryView {
        theta: &instance.theta,
        vertices: instance.polytope.vertices(),
        x_star: instance.x_star,
        second_best: instance.second_best,
    };
    let strategy = corruptions.build(corruption, &view)?;
    let model = LinearRewardModel::new(instance.theta.clone(), instance.noise)
        .map_err(HarnessError::Env)?;
    let mut env_rng = ChaCha8Rng::seed_from_u64(seed);
    env_rng.set_stream(0);
    let mut env = Environment::new(instance.polytope.clone(), model, strategy, env_rng);

    let keep_history = env.needs_history();
    let mut history = History::default();
    let best_score = dot(
        &instance.polytope.vertices()[instance.x_star],
        &instance.theta,
    );

    let steps = options.max_steps.map_or(horizon, |m| m.min(horizon));
    let mut rows = Vec::with_capacity(if options.record_trace {
        steps as usize
    } else {
        0
    });
    let mut cum_regret = 0.0f64;
    for t in 1..=steps {
        env.begin_round(t, &history)?;
        let choice = learner.choose(t)?;
        let point = choice.point(&instance.polytope, &basis);
        let outcome = env.observe(t, &point)?;
        learner.record(t, &choice, outcome.observed_reward);
        // x* maximizes the linear score over the whole set, so this is
        // nonnegative up to float rounding.
        let inst_regret = (best_score - dot(&point, &instance.theta)).max(0.0);
        if keep_history {
            history.push(HistoryRecord {
                t,
                vertex_index: match choice {
                    Choice::Vertex(i) => Some(i),
                    Choice::Explore(_) => None,
                },
                point,
                observed: outcome.observed_reward,
            });
        }
        cum_regret += inst_regret;
        if options.record_trace {
            rows.push(StepRow {
                t,
                epoch: learner.current_epoch(),
                choice,
                actual: outcome.actual_reward,
                observed: outcome.observed_reward,
                inst_regret,
                cum_regret,
            });
        }
    }
    learner.finalize()?;

    let epoch_records = learner.epoch_records().to_vec();
    let ledger = env.into_ledger();
    let lemma_report = if options.check_lemmas {
        let shifted = basis.shifted_vertices(&instance.polytope);
        Some(lemma_checks(
            &epoch_records,
            &basis,
            &shifted,
            &instance.theta,
            instance.delta,
            Some(&ledger),
        )?)
    } else {
        None
    };
    Ok(RunOutput {
        trace: RegretTrace {
            algorithm: algorithm.name.clone(),
            seed,
            rows,
            final_regret: cum_regret,
        },
        epoch_records,
        ledger,
        lemma_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make_instance, InstanceConfig, NoiseKind};

    fn box_instance(noise: NoiseKind) -> BuiltInstance {
        make_instance(&InstanceConfig {
            family: "box".into(),
            d: 2,
            scale: Some(0.7),
            path: None,
            theta: Some(vec![0.5, 0.1]),
            delta_floor: 0.05,
            noise,
            instance_seed: 0,
        })
        .unwrap()
    }

    #[test]
    fn regret_is_nonnegative_monotone_and_resums() {
        let instance = box_instance(NoiseKind::GaussianStd);
        let basis = prepare_basis(&instance, EllipsoidMode::Weak).unwrap();
        let algo = AlgorithmConfig {
            name: "sbe".into(),
            zeta_scale: 1e-5,
            ..Default::default()
        };
        let out = run_experiment(
            &instance,
            basis,
            &algo,
            &CorruptionConfig::default(),
            2_000,
            9,
            &RunOptions::default(),
        )
        .unwrap();
        let mut cum = 0.0;
        let mut prev = 0.0;
        for row in &out.trace.rows {
            assert!(row.inst_regret >= 0.0);
            assert!(row.cum_regret >= prev);
            cum += row.inst_regret;
            assert!((cum - row.cum_regret).abs() < 1e-9);
            prev = row.cum_regret;
        }
        assert!((cum - out.trace.final_regret).abs() < 1e-9);
        assert_eq!(out.trace.rows.len(), 2_000);
        assert_eq!(out.ledger.rounds(), 2_000);
    }

    #[test]
    fn all_star_pulls_zero_regret_and_single_defect_costs_delta() {
        // Replay arithmetic against hand values through a tiny ETC run:
        // budget 0 commits to vertex 0 immediately.
        let instance = box_instance(NoiseKind::None);
        let basis = prepare_basis(&instance, EllipsoidMode::Weak).unwrap();
        let algo = AlgorithmConfig {
            name: "etc".into(),
            explore_rounds_per_vertex: 1,
            ..Default::default()
        };
        let out = run_experiment(
            &instance,
            basis,
            &algo,
            &CorruptionConfig::default(),
            6,
            1,
            &RunOptions::default(),
        )
        .unwrap();
        // Rounds 1..4 explore all vertices once; x* = vertex 3 contributes 0,
        // the others pay their own gaps. Rounds 5..6 exploit x*.
        let star = out.trace.rows[3].clone();
        assert_eq!(star.choice, Choice::Vertex(3));
        assert_eq!(star.inst_regret, 0.0);
        let runner_up = out.trace.rows[1].clone();
        assert_eq!(runner_up.choice, Choice::Vertex(1));
        assert!((runner_up.inst_regret - 0.14).abs() < 1e-12);
        assert_eq!(out.trace.rows[5].choice, Choice::Vertex(3));
        assert_eq!(out.trace.rows[5].inst_regret, 0.0);
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let instance = box_instance(NoiseKind::GaussianStd);
        let basis = prepare_basis(&instance, EllipsoidMode::Weak).unwrap();
        let algo = AlgorithmConfig {
            name: "sbe".into(),
            zeta_scale: 1e-5,
            ..Default::default()
        };
        let corr = CorruptionConfig {
            name: "first_k_flip".into(),
            budget: 25.0,
            ..Default::default()
        };
        let mk = || {
            run_experiment(
                &instance,
                prepare_basis(&instance, EllipsoidMode::Weak).unwrap(),
                &algo,
                &corr,
                3_000,
                1234,
                &RunOptions::default(),
            )
            .unwrap()
        };
        let _ = basis;
        let a = mk();
        let b = mk();
        assert_eq!(a.trace.rows, b.trace.rows);
        assert_eq!(a.trace.final_regret, b.trace.final_regret);
        assert_eq!(a.ledger.total(), b.ledger.total());
    }

    #[test]
    fn submitted_actions_always_satisfy_the_halfspaces() {
        let instance = box_instance(NoiseKind::GaussianStd);
        let basis = prepare_basis(&instance, EllipsoidMode::Weak).unwrap();
        for name in ["sbe", "oful", "etc"] {
            let algo = AlgorithmConfig {
                name: name.into(),
                zeta_scale: 1e-5,
                explore_rounds_per_vertex: 3,
                ..Default::default()
            };
            let out = run_experiment(
                &instance,
                basis.clone(),
                &algo,
                &CorruptionConfig::default(),
                500,
                7,
                &RunOptions::default(),
            )
            .unwrap();
            for row in &out.trace.rows {
                let p = row.choice.point(&instance.polytope, &basis);
                assert!(instance.polytope.contains(&p, 1e-9));
            }
        }
    }

    #[test]
    fn lean_mode_skips_rows_but_keeps_the_final_regret() {
        let instance = box_instance(NoiseKind::GaussianStd);
        let basis = prepare_basis(&instance, EllipsoidMode::Weak).unwrap();
        let algo = AlgorithmConfig {
            name: "sbe".into(),
            zeta_scale: 1e-5,
            ..Default::default()
        };
        let opts = RunOptions {
            record_trace: false,
            ..Default::default()
        };
        let lean = run_experiment(
            &instance,
            basis.clone(),
            &algo,
            &CorruptionConfig::default(),
            2_000,
            9,
            &opts,
        )
        .unwrap();
        let full = run_experiment(
            &instance,
            basis,
            &algo,
            &CorruptionConfig::default(),
            2_000,
            9,
            &RunOptions::default(),
        )
        .unwrap();
        assert!(lean.trace.rows.is_empty());
        assert_eq!(lean.trace.final_regret, full.trace.final_regret);
    }
}
