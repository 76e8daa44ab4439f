//! Sub-Gaussian mean-deviation tolerance used by statistical tests.

use super::HarnessError;

/// Deviation bound `sqrt(2 sigma^2 log(2 / eps) / n)`: the mean of `n`
/// independent sub-Gaussian draws with variance proxy `sigma^2` exceeds this
/// with probability at most `eps`.
pub fn concentration_tolerance(n: u64, sigma_sq: f64, eps: f64) -> Result<f64, HarnessError> {
    if n == 0 {
        return Err(HarnessError::InvalidParameter(
            "n must be at least 1".into(),
        ));
    }
    if eps <= 0.0 || eps >= 1.0 || eps.is_nan() {
        return Err(HarnessError::InvalidParameter(format!(
            "eps {eps} outside (0, 1)"
        )));
    }
    if sigma_sq < 0.0 || sigma_sq.is_nan() {
        return Err(HarnessError::InvalidParameter(
            "variance proxy must be nonnegative".into(),
        ));
    }
    Ok((2.0 * sigma_sq * (2.0 / eps).ln() / n as f64).sqrt())
}
