//! Replicated experiment grids over (corruption budget, dimension,
//! algorithm) with deterministic, order-independent aggregation.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::config::SweepConfig;
use crate::env::make_instance;

use super::{prepare_basis, run_experiment, HarnessError, RunOptions, RunOutput};

/// One grid cell identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub budget: f64,
    pub d: usize,
    pub algorithm: String,
    pub seed: u64,
}

/// One finished replication. `output` is retained only when per-cell traces
/// or lemma reports were requested.
#[derive(Debug)]
pub struct SweepRun {
    pub cell: SweepCell,
    pub final_regret: f64,
    pub output: Option<RunOutput>,
}

/// Aggregated statistics for one (budget, d, algorithm) group.
#[derive(Debug, Clone, Serialize)]
pub struct SweepAggregate {
    pub budget: f64,
    pub d: usize,
    pub algorithm: String,
    pub replications: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

#[derive(Debug)]
pub struct SweepResult {
    pub runs: Vec<SweepRun>,
    pub aggregates: Vec<SweepAggregate>,
}

impl SweepResult {
    /// Rows for the summary CSV in deterministic grid order.
    pub fn summary_rows(&self) -> Vec<(f64, usize, String, u64, f64)> {
        self.runs
            .iter()
            .map(|r| {
                (
                    r.cell.budget,
                    r.cell.d,
                    r.cell.algorithm.clone(),
                    r.cell.seed,
                    r.final_regret,
                )
            })
            .collect()
    }
}

/// Run the full grid with up to `jobs` worker threads.
///
/// Tasks are independent (each owns its RNG streams) and results are merged
/// by task index, so the aggregate is a pure function of (config, seeds)
/// regardless of scheduling.
pub fn sweep(cfg: &SweepConfig, jobs: usize) -> Result<SweepResult, HarnessError> {
    let dims = cfg.dims.clone().unwrap_or_else(|| vec![cfg.instance.d]);
    let keep_outputs = cfg.record_traces || cfg.check_lemmas;
    let mut cells = Vec::new();
    for &d in &dims {
        for &budget in &cfg.budgets {
            for algo in &cfg.algorithms {
                for &seed in &cfg.seeds {
                    cells.push((d, budget, algo.clone(), seed));
                }
            }
        }
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<SweepRun, HarnessError>>>> =
        Mutex::new((0..cells.len()).map(|_| None).collect());
    let workers = jobs.max(1).min(cells.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= cells.len() {
                    break;
                }
                let (d, budget, algo, seed) = &cells[idx];
                let run = run_cell(cfg, *d, *budget, algo, *seed, keep_outputs);
                results.lock().unwrap()[idx] = Some(run);
            });
        }
    });

    let mut runs = Vec::with_capacity(cells.len());
    for slot in results.into_inner().unwrap() {
        runs.push(slot.expect("every task ran")?);
    }
    let aggregates = aggregate(&runs);
    Ok(SweepResult { runs, aggregates })
}

fn run_cell(
    cfg: &SweepConfig,
    d: usize,
    budget: f64,
    algo: &crate::learner::AlgorithmConfig,
    seed: u64,
    keep_output: bool,
) -> Result<SweepRun, HarnessError> {
    let mut instance_cfg = cfg.instance.clone();
    instance_cfg.d = d;
    let instance = make_instance(&instance_cfg)?;
    let basis = prepare_basis(&instance, algo.mode)?;
    let mut corruption = cfg.corruption.clone();
    corruption.budget = budget;
    let options = RunOptions {
        record_trace: cfg.record_traces,
        max_steps: None,
        check_lemmas: cfg.check_lemmas,
    };
    let output = run_experiment(
        &instance,
        basis,
        algo,
        &corruption,
        cfg.horizon,
        seed,
        &options,
    )?;
    Ok(SweepRun {
        cell: SweepCell {
            budget,
            d,
            algorithm: algo.name.clone(),
            seed,
        },
        final_regret: output.trace.final_regret,
        output: keep_output.then_some(output),
    })
}

fn aggregate(runs: &[SweepRun]) -> Vec<SweepAggregate> {
    let mut groups: Vec<((String, usize, u64), Vec<f64>)> = Vec::new();
    for run in runs {
        let key = (
            run.cell.algorithm.clone(),
            run.cell.d,
            run.cell.budget.to_bits(),
        );
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(run.final_regret),
            None => groups.push((key, vec![run.final_regret])),
        }
    }
    groups
        .into_iter()
        .map(|((algorithm, d, budget_bits), mut regrets)| {
            regrets.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = regrets.len();
            let mean = regrets.iter().sum::<f64>() / n as f64;
            SweepAggregate {
                budget: f64::from_bits(budget_bits),
                d,
                algorithm,
                replications: n,
                mean,
                median: percentile(&regrets, 0.5),
                q1: percentile(&regrets, 0.25),
                q3: percentile(&regrets, 0.75),
            }
        })
        .collect()
}

/// Linear-interpolation percentile of a sorted slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}
