//! Epoch schedule arithmetic: zeta, epoch lengths, exploration ratios, and
//! the diagnostic confidence width.
//!
//! Epochs grow geometrically: epoch `m` has real-valued length
//! `zeta * 4^m + zeta / delta_hat^2`, rounded up to an integer step count as
//! a whole. The identity `gamma_{m-1} * N_m = zeta / delta_hat^2` holds
//! exactly before rounding and within one `gamma_{m-1}` after it; callers
//! that care about the slack carry it explicitly.

use crate::geometry::EllipsoidMode;

use super::LearnerError;

/// Formula value of the exploration constant zeta.
///
/// Weak mode pays an extra dimension factor for the looser containment
/// guarantee (`d^6` against `d^5` in exact mode). `log` is natural.
pub fn default_zeta(d: usize, horizon: u64, delta: f64, mode: EllipsoidMode) -> f64 {
    let d = d as f64;
    let power = match mode {
        EllipsoidMode::Exact => 5,
        EllipsoidMode::Weak => 6,
    };
    let log_term = (4.0 * d * (horizon as f64).ln() / delta).ln();
    (1u64 << 14) as f64 * d.powi(power) * log_term
}

/// Exploration probability after epoch `m` closes with gap estimate
/// `delta_hat`: `delta_hat^{-2} / (delta_hat^{-2} + 2^{2(m+1)})`.
///
/// With the floor `delta_hat >= 2^{-m}` this always lands in `(0, 1/5]`,
/// and `exploration_ratio(0, 1) = 1/5` reproduces the initial ratio.
pub fn exploration_ratio(m: u32, delta_hat: f64) -> f64 {
    let inv2 = delta_hat.powi(-2);
    inv2 / (inv2 + 4f64.powi(m as i32 + 1))
}

/// One epoch of the schedule, with integer step counts and the exploration
/// probability carried over from the previous epoch's estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSchedule {
    pub m: u32,
    /// `ceil(zeta * 4^m)`.
    pub n_m: u64,
    /// Integer epoch length `N_m` (before horizon truncation).
    pub len: u64,
    /// First round of the epoch (1-based, inclusive).
    pub t_start: u64,
    /// Last round of the epoch (inclusive, truncated at the horizon).
    pub t_end: u64,
    /// Whether the horizon cut this epoch short.
    pub truncated: bool,
    /// `gamma_{m-1}`, the Bernoulli exploration probability used throughout.
    pub gamma_prev: f64,
    /// Expected exploration pulls per axis, `gamma_{m-1} * N_m / d`, before
    /// rounding.
    pub expected_per_axis: f64,
}

/// Build epoch `m`'s schedule from the previous epoch's gap estimate.
///
/// `t_prev_end` is the last round of epoch `m-1` (0 for the first epoch).
pub fn next_schedule(
    m: u32,
    delta_hat_prev: f64,
    zeta: f64,
    d: usize,
    horizon: u64,
    t_prev_end: u64,
) -> Result<EpochSchedule, LearnerError> {
    if m == 0 {
        return Err(LearnerError::InvalidParameter(
            "epoch index starts at 1".into(),
        ));
    }
    if delta_hat_prev <= 0.0 || !delta_hat_prev.is_finite() {
        return Err(LearnerError::InvalidParameter(format!(
            "gap estimate {delta_hat_prev} must be positive"
        )));
    }
    if zeta <= 0.0 || zeta.is_nan() {
        return Err(LearnerError::InvalidParameter(
            "zeta must be positive".into(),
        ));
    }
    if t_prev_end >= horizon {
        return Err(LearnerError::HorizonExhausted { t: t_prev_end });
    }
    let explore_len = zeta * delta_hat_prev.powi(-2);
    let n_real = zeta * 4f64.powi(m as i32);
    let len = (n_real + explore_len).ceil().max(1.0) as u64;
    let gamma_prev = exploration_ratio(m - 1, delta_hat_prev);
    let natural_end = t_prev_end + len;
    let t_end = natural_end.min(horizon);
    Ok(EpochSchedule {
        m,
        n_m: n_real.ceil() as u64,
        len,
        t_start: t_prev_end + 1,
        t_end,
        truncated: natural_end > horizon,
        gamma_prev,
        expected_per_axis: gamma_prev * len as f64 / d as f64,
    })
}

/// Diagnostic confidence width for epoch `m`:
/// `4 * k * d * C_m / N_m + k * delta_hat_prev / (16 d)`.
///
/// With `coeff_scale = d` this is the standard width
/// `4 d^2 C_m / N_m + delta_hat_prev / 16`; passing a certified containment
/// factor instead keeps weak-mode diagnostics sound. Harness-side only: the
/// learner never sees `C_m`.
pub fn beta_m(coeff_scale: f64, d: usize, c_m: f64, n_m_len: f64, delta_hat_prev: f64) -> f64 {
    let d = d as f64;
    4.0 * coeff_scale * d * c_m / n_m_len + coeff_scale * delta_hat_prev / (16.0 * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zeta_with_unit_log_term_is_two_to_fourteen() {
        // Choose delta so that 4 d ln(T) / delta = e.
        let horizon = 20u64;
        let delta = 4.0 * (horizon as f64).ln() / std::f64::consts::E;
        let z = default_zeta(1, horizon, delta, EllipsoidMode::Weak);
        assert!((z - 16384.0).abs() < 1e-9, "zeta {z}");
    }

    #[test]
    fn mode_ratio_is_exactly_d() {
        for d in [2usize, 3, 5] {
            let weak = default_zeta(d, 1000, 0.1, EllipsoidMode::Weak);
            let exact = default_zeta(d, 1000, 0.1, EllipsoidMode::Exact);
            assert!((weak / exact - d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_ratio_is_one_fifth() {
        assert!((exploration_ratio(0, 1.0) - 0.2).abs() < 1e-15);
        assert!((exploration_ratio(1, 1.0) - 1.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn schedule_matches_hand_computed_example() {
        // zeta = 10, gap 1, epoch 1: n_1 = 40, N_1 = 50.
        let s = next_schedule(1, 1.0, 10.0, 2, 10_000, 0).unwrap();
        assert_eq!(s.n_m, 40);
        assert_eq!(s.len, 50);
        assert_eq!((s.t_start, s.t_end), (1, 50));
        assert!((s.gamma_prev - 0.2).abs() < 1e-15);
        // gamma_0 * N_1 = zeta * gap^{-2}.
        assert!((s.gamma_prev * s.len as f64 - 10.0).abs() < 1e-12);
        // zeta = 10, gap 1/2, epoch 2: n_2 = 160, N_2 = 200.
        let s = next_schedule(2, 0.5, 10.0, 2, 10_000, 50).unwrap();
        assert_eq!(s.n_m, 160);
        assert_eq!(s.len, 200);
    }

    #[test]
    fn truncation_and_exhaustion() {
        let s = next_schedule(1, 1.0, 10.0, 2, 30, 0).unwrap();
        assert_eq!(s.t_end, 30);
        assert!(s.truncated);
        assert!(matches!(
            next_schedule(2, 1.0, 10.0, 2, 30, 30),
            Err(LearnerError::HorizonExhausted { .. })
        ));
    }

    #[test]
    fn beta_matches_hand_arithmetic() {
        // d = 2, C_m = 5, N_m = 100, gap 1/2: 16*5/100 + (1/2)/16.
        let b = beta_m(2.0, 2, 5.0, 100.0, 0.5);
        assert!((b - 0.83125).abs() < 1e-12);
        // Zero corruption leaves only the gap term.
        assert!((beta_m(2.0, 2, 0.0, 100.0, 1.0) - 1.0 / 16.0).abs() < 1e-15);
        // Monotone in C_m.
        assert!(beta_m(2.0, 2, 6.0, 100.0, 0.5) > b);
    }

    proptest! {
        #[test]
        fn schedule_identity_within_one_step_slack(
            m in 1u32..12,
            gap_scale in 0.0f64..1.0,
            zeta in 0.5f64..500.0,
        ) {
            // gap in [2^{-(m-1)}, 1]: the floor guarantees this range.
            let floor = 2f64.powi(-(m as i32 - 1));
            let gap = floor + gap_scale * (1.0 - floor);
            let s = next_schedule(m, gap, zeta, 2, u64::MAX, 0).unwrap();
            let target = zeta * gap.powi(-2);
            // Exact before rounding.
            let real_len = zeta * 4f64.powi(m as i32) + target;
            prop_assert!((s.gamma_prev * real_len - target).abs() <= 1e-9 * target.max(1.0));
            // Within one step's worth of gamma after rounding.
            prop_assert!((s.gamma_prev * s.len as f64 - target).abs() <= s.gamma_prev + 1e-9);
            // gamma stays in (0, 1/5].
            prop_assert!(s.gamma_prev > 0.0 && s.gamma_prev <= 0.2 + 1e-15);
        }

        #[test]
        fn epoch_length_dominates_geometric_growth(
            m in 1u32..10,
            zeta in 0.5f64..100.0,
        ) {
            let s = next_schedule(m, 1.0, zeta, 2, u64::MAX, 0).unwrap();
            prop_assert!(s.len as f64 >= zeta * 4f64.powi(m as i32));
        }

        #[test]
        fn floored_gap_pins_ratio_at_one_fifth(m in 0u32..20) {
            let gamma = exploration_ratio(m, 2f64.powi(-(m as i32)));
            prop_assert!((gamma - 0.2).abs() < 1e-12);
        }
    }
}
