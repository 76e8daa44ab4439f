//! Harness-side confidence-bound checks.
//!
//! These evaluate, per closed epoch, the concentration bounds the learner's
//! analysis relies on: the per-coordinate estimate error, the uniform
//! vertex-score error against the width `beta_m`, and the upper/lower
//! sandwich on the estimated gap with the geometric corruption decay
//! `rho_m = d^2 sum_s 8^{-(m-s)} C_s / N_s`. They need the true hidden
//! vector and the corruption ledger, so they live strictly harness-side.

use serde::Serialize;

use crate::env::CorruptionLedger;
use crate::geometry::{decompose, ExplorationBasis};
use crate::learner::{beta_m, EpochRecord};
use crate::linalg::dot;

use super::HarnessError;

/// One epoch's bound evaluations.
#[derive(Debug, Clone, Serialize)]
pub struct EpochLemmaCheck {
    pub m: u32,
    pub c_m: f64,
    pub n_m_len: u64,
    /// `max_j |b_hat_j - b_j| ||s_j||^2` against `2 C_m / N_m + gap_prev / (32 d^2)`.
    pub axis_error: f64,
    pub axis_bound: f64,
    pub axis_ok: bool,
    /// `max over vertices |<x, theta_hat - theta>|` against `beta_m`.
    pub vertex_error: f64,
    pub beta_m: f64,
    pub vertex_ok: bool,
    /// Gap sandwich: lower <= delta_hat <= upper.
    pub delta_hat: f64,
    pub sandwich_upper: f64,
    pub sandwich_lower: f64,
    pub sandwich_ok: bool,
    pub rho_m: f64,
}

/// Full report over a run's closed epochs.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub epochs: Vec<EpochLemmaCheck>,
    pub axis_violation_fraction: f64,
    pub vertex_violation_fraction: f64,
    pub sandwich_violation_fraction: f64,
    /// Largest disagreement between the recursive and closed-form `rho_m`.
    pub rho_consistency: f64,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.epochs
            .iter()
            .all(|e| e.axis_ok && e.vertex_ok && e.sandwich_ok)
    }
}

/// Evaluate the bounds for every closed epoch of a finished run.
///
/// `true_delta` is the instance's actual best-to-second gap. The ledger is
/// mandatory; callers without one cannot run the checks.
pub fn lemma_checks(
    records: &[EpochRecord],
    basis: &ExplorationBasis,
    shifted_vertices: &[Vec<f64>],
    theta: &[f64],
    true_delta: f64,
    ledger: Option<&CorruptionLedger>,
) -> Result<LemmaReport, HarnessError> {
    let ledger = ledger.ok_or(HarnessError::MissingLedger)?;
    let d = basis.dim();
    let boundaries: Vec<u64> = records
        .iter()
        .scan(0u64, |acc, r| {
            *acc += r.len;
            Some(*acc)
        })
        .collect();
    let c_ms = ledger.epoch_close(&boundaries)?;

    // True coordinates of theta in the basis (exact: the axes span R^d).
    let b_true = decompose(theta, basis).coefficients;

    let mut epochs = Vec::with_capacity(records.len());
    let mut rho_recursive = 0.0f64;
    let mut rho_consistency = 0.0f64;
    let mut axis_bad = 0usize;
    let mut vertex_bad = 0usize;
    let mut sandwich_bad = 0usize;
    for (idx, rec) in records.iter().enumerate() {
        let m = rec.m;
        let c_m = c_ms[idx];
        let n_len = rec.len as f64;
        let gap_prev = if idx == 0 {
            1.0
        } else {
            records[idx - 1].delta_hat
        };

        let b_hat = decompose(&rec.theta_hat, basis).coefficients;
        let mut axis_error = 0.0f64;
        for j in 0..d {
            let len2 = dot(&basis.axes[j], &basis.axes[j]);
            axis_error = axis_error.max((b_hat[j] - b_true[j]).abs() * len2);
        }
        let axis_bound = 2.0 * c_m / n_len + gap_prev / (32.0 * (d * d) as f64);
        let axis_ok = axis_error <= axis_bound + 1e-12;

        let diff: Vec<f64> = rec
            .theta_hat
            .iter()
            .zip(theta)
            .map(|(a, b)| a - b)
            .collect();
        let vertex_error = shifted_vertices
            .iter()
            .map(|v| dot(v, &diff).abs())
            .fold(0.0f64, f64::max);
        let beta = beta_m(d as f64, d, c_m, n_len, gap_prev);
        let vertex_ok = vertex_error <= beta + 1e-12;

        // rho_m both ways: recursion rho_m = rho_{m-1} / 8 + d^2 C_m / N_m
        // and the closed geometric sum.
        rho_recursive = rho_recursive / 8.0 + (d * d) as f64 * c_m / n_len;
        let mut rho_closed = 0.0;
        for (s_idx, s_rec) in records[..=idx].iter().enumerate() {
            let weight = 8f64.powi(-(m as i32 - s_rec.m as i32));
            rho_closed += (d * d) as f64 * weight * c_ms[s_idx] / s_rec.len as f64;
        }
        rho_consistency = rho_consistency.max((rho_recursive - rho_closed).abs());

        let pow2m = 2f64.powi(-(m as i32));
        let upper = 2.0 * (true_delta + pow2m + 4.0 * rho_closed);
        let lower = true_delta / 2.0 - pow2m / 2.0 - 8.0 * rho_closed;
        let sandwich_ok = rec.delta_hat >= lower - 1e-12 && rec.delta_hat <= upper + 1e-12;

        axis_bad += usize::from(!axis_ok);
        vertex_bad += usize::from(!vertex_ok);
        sandwich_bad += usize::from(!sandwich_ok);
        epochs.push(EpochLemmaCheck {
            m,
            c_m,
            n_m_len: rec.len,
            axis_error,
            axis_bound,
            axis_ok,
            vertex_error,
            beta_m: beta,
            vertex_ok,
            delta_hat: rec.delta_hat,
            sandwich_upper: upper,
            sandwich_lower: lower,
            sandwich_ok,
            rho_m: rho_closed,
        });
    }
    let n = records.len().max(1) as f64;
    Ok(LemmaReport {
        epochs,
        axis_violation_fraction: axis_bad as f64 / n,
        vertex_violation_fraction: vertex_bad as f64 / n,
        sandwich_violation_fraction: sandwich_bad as f64 / n,
        rho_consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ExplorationBasis;

    fn basis() -> ExplorationBasis {
        ExplorationBasis {
            origin_shift: vec![0.0, 0.0],
            axes: vec![vec![0.7, 0.0], vec![0.0, 0.7]],
            kappa: 2f64.sqrt(),
        }
    }

    fn record(m: u32, theta_hat: Vec<f64>, delta_hat: f64, len: u64) -> EpochRecord {
        EpochRecord {
            m,
            theta_hat,
            delta_hat,
            gamma: 0.2,
            n_m: len,
            len,
            realized_counts: vec![0, 0],
        }
    }

    #[test]
    fn clean_noiseless_run_violates_nothing() {
        let basis = basis();
        let theta = vec![0.5, 0.1];
        let vertices = vec![
            vec![-0.7, -0.7],
            vec![0.7, -0.7],
            vec![-0.7, 0.7],
            vec![0.7, 0.7],
        ];
        let mut ledger = CorruptionLedger::default();
        for t in 1..=150 {
            ledger.push(t, 0.0);
        }
        // Exact estimates in both epochs.
        let records = vec![
            record(1, theta.clone(), 0.5, 50),
            record(2, theta.clone(), 0.25, 100),
        ];
        let report =
            lemma_checks(&records, &basis, &vertices, &theta, 0.14, Some(&ledger)).unwrap();
        assert!(report.all_hold(), "{report:?}");
        assert_eq!(report.axis_violation_fraction, 0.0);
        assert!(report.rho_consistency < 1e-12);
    }

    #[test]
    fn missing_ledger_is_an_error() {
        let basis = basis();
        let records = vec![record(1, vec![0.0, 0.0], 0.5, 10)];
        assert!(matches!(
            lemma_checks(&records, &basis, &[], &[0.0, 0.0], 0.1, None),
            Err(HarnessError::MissingLedger)
        ));
    }

    #[test]
    fn rho_recursion_matches_closed_form_with_corruption() {
        let basis = basis();
        let theta = vec![0.5, 0.1];
        let vertices = vec![vec![0.7, 0.7], vec![0.7, -0.7], vec![-0.7, 0.7]];
        let mut ledger = CorruptionLedger::default();
        for t in 1..=350u64 {
            ledger.push(t, if t % 7 == 0 { 0.8 } else { 0.0 });
        }
        let records = vec![
            record(1, theta.clone(), 0.5, 50),
            record(2, theta.clone(), 0.25, 100),
            record(3, theta.clone(), 0.2, 200),
        ];
        let report =
            lemma_checks(&records, &basis, &vertices, &theta, 0.14, Some(&ledger)).unwrap();
        assert!(report.rho_consistency < 1e-12, "{}", report.rho_consistency);
        // Corruption entered the ledger, so rho must be positive.
        assert!(report.epochs.last().unwrap().rho_m > 0.0);
    }
}
