use crate::error::{Error, Result};
use crate::normal;

/// Undiscounted Black value `E[max(F - K, 0)]` for a driftless log-normal
/// `F` with `F(0) = forward` and total log-standard deviation `total_stdev`.
pub fn black_caplet_value(forward: f64, strike: f64, total_stdev: f64) -> Result<f64> {
    if !(forward > 0.0) || !forward.is_finite() {
        return Err(Error::domain(format!(
            "forward must be positive, got {forward}"
        )));
    }
    if !(strike >= 0.0) || !strike.is_finite() {
        return Err(Error::domain(format!(
            "strike must be nonnegative, got {strike}"
        )));
    }
    if !(total_stdev >= 0.0) || !total_stdev.is_finite() {
        return Err(Error::domain(format!(
            "total standard deviation must be nonnegative, got {total_stdev}"
        )));
    }
    if strike == 0.0 {
        return Ok(forward);
    }
    if total_stdev == 0.0 {
        return Ok((forward - strike).max(0.0));
    }
    let d1 = ((forward / strike).ln() + 0.5 * total_stdev * total_stdev) / total_stdev;
    let d2 = d1 - total_stdev;
    let value = forward * normal::cdf(d1) - strike * normal::cdf(d2);
    Ok(value.clamp((forward - strike).max(0.0), forward))
}
