use crate::error::{Error, Result};
use crate::sum::KahanSum;

/// Largest `x` with finite `exp(x)`.
pub const LN_F64_MAX: f64 = 709.782_712_893_384;

/// Weighted Monte Carlo estimate of `E[exp(v log²(X / c))]` with tail diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub v: f64,
    /// May be `+inf` when the value itself overflows; see `ln_estimate`.
    pub estimate: f64,
    pub ln_estimate: f64,
    pub std_error: f64,
    /// `std_error / estimate`, finite even when `estimate` overflows.
    pub rel_std_error: f64,
    /// Largest single-path share of the weighted sum.
    pub max_contribution_share: f64,
    /// Kish effective sample size of the weights.
    pub n_effective: f64,
    /// Paths whose integrand `exp(v log² x)` overflows `f64`.
    pub saturated_paths: usize,
}

impl MomentEstimate {
    pub fn is_saturated(&self) -> bool {
        self.saturated_paths > 0
    }
}

pub(crate) fn validate_inputs(samples: &[f64], weights: Option<&[f64]>) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    if let Some(&x) = samples.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::domain(format!("samples must be positive, got {x}")));
    }
    if let Some(w) = weights {
        if w.len() != samples.len() {
            return Err(Error::domain(format!(
                "{} weights for {} samples",
                w.len(),
                samples.len()
            )));
        }
        if let Some(&x) = w.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
            return Err(Error::domain(format!("weights must be positive, got {x}")));
        }
    }
    Ok(())
}

/// `log²(x / center)` per sample.
pub(crate) fn log_squares(samples: &[f64], center: f64) -> Vec<f64> {
    let lc = center.ln();
    samples
        .iter()
        .map(|x| {
            let l = x.ln() - lc;
            l * l
        })
        .collect()
}

/// Self-normalised estimate of `E[exp(v log² X)]` with weights `w`
/// (all ones for the sampling measure, likelihood ratios otherwise).
pub fn estimate_logsquare_moment(
    samples: &[f64],
    weights: Option<&[f64]>,
    v: f64,
) -> Result<MomentEstimate> {
    estimate_logsquare_moment_about(samples, weights, v, 1.0)
}

/// As [`estimate_logsquare_moment`] for `exp(v log²(X / center))`.
///
/// Rescaling `X` by a constant leaves the critical exponent unchanged; centring
/// at the typical level keeps the integrand's mass inside the sampled region.
pub fn estimate_logsquare_moment_about(
    samples: &[f64],
    weights: Option<&[f64]>,
    v: f64,
    center: f64,
) -> Result<MomentEstimate> {
    validate_inputs(samples, weights)?;
    if !(center > 0.0) || !center.is_finite() {
        return Err(Error::domain(format!(
            "center must be positive, got {center}"
        )));
    }
    if !v.is_finite() {
        return Err(Error::domain(format!("v must be finite, got {v}")));
    }
    let u = log_squares(samples, center);
    Ok(moment_from_log_squares(&u, weights, v))
}

pub(crate) fn moment_from_log_squares(
    u: &[f64],
    weights: Option<&[f64]>,
    v: f64,
) -> MomentEstimate {
    let n = u.len();
    let w_at = |i: usize| weights.map_or(1.0, |w| w[i]);
    let w_sum: f64 = (0..n).map(w_at).collect::<KahanSum>().value();
    let w_sq: f64 = (0..n)
        .map(|i| w_at(i) * w_at(i))
        .collect::<KahanSum>()
        .value();
    let w_max = (0..n).map(w_at).fold(0.0, f64::max);
    let n_effective = w_sum * w_sum / w_sq;

    if v == 0.0 {
        return MomentEstimate {
            v,
            estimate: 1.0,
            ln_estimate: 0.0,
            std_error: 0.0,
            rel_std_error: 0.0,
            max_contribution_share: w_max / w_sum,
            n_effective,
            saturated_paths: 0,
        };
    }

    let ln_w = |i: usize| weights.map_or(0.0, |w| w[i].ln());
    let saturated_paths = u.iter().filter(|&&x| v * x > LN_F64_MAX).count();
    let a_max = (0..n)
        .map(|i| ln_w(i) + v * u[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let scaled: f64 = (0..n)
        .map(|i| (ln_w(i) + v * u[i] - a_max).exp())
        .collect::<KahanSum>()
        .value();
    let ln_estimate = a_max + scaled.ln() - w_sum.ln();

    // delta-method variance of the ratio estimator, relative to the estimate
    let rel_var: f64 = (0..n)
        .map(|i| {
            let share = w_at(i) / w_sum;
            let d = (v * u[i] - ln_estimate).exp() - 1.0;
            share * share * d * d
        })
        .collect::<KahanSum>()
        .value();
    let rel_std_error = rel_var.sqrt();
    let estimate = ln_estimate.exp();

    MomentEstimate {
        v,
        estimate,
        ln_estimate,
        std_error: rel_std_error * estimate,
        rel_std_error,
        max_contribution_share: 1.0 / scaled,
        n_effective,
        saturated_paths,
    }
}
