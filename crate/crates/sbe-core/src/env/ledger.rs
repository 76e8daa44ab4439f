//! Ledger of declared corruption magnitudes.
//!
//! Stores only the nonzero entries; uncorrupted rounds are implicit. The
//! total budget `C` is the sum over rounds of the declared sup-magnitude,
//! and per-epoch sums `C_m` are recovered from epoch boundaries.

use super::EnvError;

#[derive(Debug, Clone, Default)]
pub struct CorruptionLedger {
    nonzero: Vec<(u64, f64)>,
    rounds: u64,
    total: f64,
}

impl CorruptionLedger {
    /// Record round `t`'s declared magnitude. Rounds must arrive in order.
    pub fn push(&mut self, t: u64, declared_magnitude: f64) {
        debug_assert!(t > self.rounds, "ledger rounds must be monotone");
        debug_assert!(declared_magnitude >= 0.0);
        if declared_magnitude != 0.0 {
            self.nonzero.push((t, declared_magnitude));
        }
        self.rounds = t;
        self.total += declared_magnitude;
    }

    /// Number of recorded rounds.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Total corruption `C`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Declared magnitude of round `t`.
    pub fn magnitude_at(&self, t: u64) -> f64 {
        match self.nonzero.binary_search_by_key(&t, |&(r, _)| r) {
            Ok(i) => self.nonzero[i].1,
            Err(_) => 0.0,
        }
    }

    /// Per-step rows `(t, declared_magnitude, cumulative)` for export.
    pub fn per_step(&self) -> impl Iterator<Item = (u64, f64, f64)> + '_ {
        let mut cum = 0.0;
        (1..=self.rounds).map(move |t| {
            let m = self.magnitude_at(t);
            cum += m;
            (t, m, cum)
        })
    }

    /// Close epochs at the given cumulative boundaries `T_1 <= T_2 <= ...`
    /// and return the per-epoch sums `C_m` over `(T_{m-1}, T_m]`.
    pub fn epoch_close(&self, boundaries: &[u64]) -> Result<Vec<f64>, EnvError> {
        let mut prev = 0u64;
        for &b in boundaries {
            if b < prev {
                return Err(EnvError::BoundaryOutOfRange(format!(
                    "boundary {b} decreases below {prev}"
                )));
            }
            prev = b;
        }
        if prev > self.rounds {
            return Err(EnvError::BoundaryOutOfRange(format!(
                "boundary {prev} exceeds recorded rounds {}",
                self.rounds
            )));
        }
        let mut sums = vec![0.0; boundaries.len()];
        for &(t, m) in &self.nonzero {
            // First epoch whose boundary reaches t.
            let idx = boundaries.partition_point(|&b| b < t);
            if idx < sums.len() {
                sums[idx] += m;
            }
        }
        Ok(sums)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_magnitudes_close_to_zero_epochs() {
        let mut ledger = CorruptionLedger::default();
        for t in 1..=50 {
            ledger.push(t, 0.0);
        }
        let sums = ledger.epoch_close(&[10, 50]).unwrap();
        assert_eq!(sums, vec![0.0, 0.0]);
        assert_eq!(ledger.total(), 0.0);
    }

    #[test]
    fn first_k_window_lands_in_the_first_epoch() {
        let mut ledger = CorruptionLedger::default();
        for t in 1..=50u64 {
            ledger.push(t, if t <= 10 { 1.0 } else { 0.0 });
        }
        let sums = ledger.epoch_close(&[50]).unwrap();
        assert_eq!(sums, vec![10.0]);
        assert_eq!(ledger.total(), 10.0);
    }

    #[test]
    fn epoch_sums_match_direct_resummation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut ledger = CorruptionLedger::default();
        let mut raw = Vec::new();
        for t in 1..=400u64 {
            let m = if rng.random::<f64>() < 0.3 {
                rng.random::<f64>()
            } else {
                0.0
            };
            ledger.push(t, m);
            raw.push(m);
        }
        let boundaries = [100u64, 180, 180, 400];
        let sums = ledger.epoch_close(&boundaries).unwrap();
        let mut expect = vec![0.0; boundaries.len()];
        for (i, &m) in raw.iter().enumerate() {
            let t = (i + 1) as u64;
            let idx = boundaries.iter().position(|&b| t <= b).unwrap();
            expect[idx] += m;
        }
        for (a, b) in sums.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let total: f64 = sums.iter().sum();
        assert!((total - ledger.total()).abs() < 1e-12);
    }

    #[test]
    fn bad_boundaries_are_rejected() {
        let mut ledger = CorruptionLedger::default();
        for t in 1..=10 {
            ledger.push(t, 0.5);
        }
        assert!(matches!(
            ledger.epoch_close(&[5, 3]),
            Err(EnvError::BoundaryOutOfRange(_))
        ));
        assert!(matches!(
            ledger.epoch_close(&[11]),
            Err(EnvError::BoundaryOutOfRange(_))
        ));
    }
}
