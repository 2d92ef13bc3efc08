//! Closed-form quantities of the model: integrated variances, drifts and the
//! exp-log-square moment of a log-normal variable.

use super::config::ModelConfig;
use super::vol::VolTermStructure;
use crate::error::{Error, Result};

/// `∫_0^t σ_n(s)² ds`, summed exactly over the volatility segments.
pub fn cumulative_variance(vols: &VolTermStructure, n: usize, t: f64) -> Result<f64> {
    vols.check_index(n)?;
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    let curve = vols.curve(n);
    curve.integrate_product(curve, t)
}

/// Supremum of `v` with `E[exp(v log² F_n(t))] < ∞`, i.e. `1 / (2 ∫_0^t σ_n²)`.
pub fn critical_exponent(vols: &VolTermStructure, n: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!(
            "critical exponent needs t > 0, got {t}"
        )));
    }
    Ok(1.0 / (2.0 * cumulative_variance(vols, n, t)?))
}

/// Outcome of `E[exp(v log² X)]` for a log-normal `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogSquareMoment {
    Finite(f64),
    Divergent,
}

impl LogSquareMoment {
    pub fn is_divergent(&self) -> bool {
        matches!(self, LogSquareMoment::Divergent)
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            LogSquareMoment::Finite(x) => Some(x),
            LogSquareMoment::Divergent => None,
        }
    }
}

/// `E[exp(v log² X)]` for `log X ~ N(mu, sigma2)`:
/// `(1 - 2 sigma2 v)^{-1/2} exp(mu² v / (1 - 2 sigma2 v))` for `v < 1/(2 sigma2)`,
/// [`LogSquareMoment::Divergent`] otherwise.
pub fn lognormal_logsquare_moment(mu: f64, sigma2: f64, v: f64) -> Result<LogSquareMoment> {
    Ok(match ln_lognormal_logsquare_moment(mu, sigma2, v)? {
        Some(ln) => LogSquareMoment::Finite(ln.exp()),
        None => LogSquareMoment::Divergent,
    })
}

/// Logarithm of [`lognormal_logsquare_moment`]; `None` when divergent.
pub fn ln_lognormal_logsquare_moment(mu: f64, sigma2: f64, v: f64) -> Result<Option<f64>> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::domain(format!(
            "log-variance must be positive, got {sigma2}"
        )));
    }
    let slack = 1.0 - 2.0 * sigma2 * v;
    if !(slack > 0.0) {
        return Ok(None);
    }
    Ok(Some(-0.5 * slack.ln() + mu * mu * v / slack))
}

/// Drift rate of `F_n` under the terminal measure, per unit of `F_n`:
/// `-σ_n(t) Σ_{j>n} ρ_nj τ_j σ_j(t) F_j / (1 + τ_j F_j)`.
///
/// `rates` holds `F_1..F_M`; only the entries `j > n` are read. Exactly zero
/// for the terminal rate.
pub fn terminal_drift(config: &ModelConfig, n: usize, t: f64, rates: &[f64]) -> Result<f64> {
    config.check_rate(n)?;
    let m = config.num_rates();
    if rates.len() != m {
        return Err(Error::domain(format!(
            "state holds {} rates, model has {m}",
            rates.len()
        )));
    }
    if n == m {
        return Ok(0.0);
    }
    let vols = config.vols();
    let tenor = config.tenor();
    let mut acc = 0.0;
    for j in n + 1..=m {
        let f = rates[j - 1];
        let tau = tenor.tau(j);
        acc += config.corr().get(n - 1, j - 1) * tau * vols.sigma(j, t)? * f / (1.0 + tau * f);
    }
    Ok(-vols.sigma(n, t)? * acc)
}

/// `∫_0^t` of the frozen-drift coefficient of rate `n`, i.e. the terminal
/// drift with every `F_j(s)` replaced by `F_j(0)`. Exact for step volatilities.
pub fn frozen_drift_integral(config: &ModelConfig, n: usize, t: f64) -> Result<f64> {
    config.check_rate(n)?;
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    let expiry = config.tenor().expiry(n);
    if t > expiry {
        return Err(Error::domain(format!(
            "rate {n} expires at {expiry}, requested t={t}"
        )));
    }
    let m = config.num_rates();
    let vols = config.vols();
    let mut acc = 0.0;
    for j in n + 1..=m {
        let f0 = config.curve().forward(j);
        let tau = config.tenor().tau(j);
        let weight = config.corr().get(n - 1, j - 1) * tau * f0 / (1.0 + tau * f0);
        acc += weight * vols.curve(n).integrate_product(vols.curve(j), t)?;
    }
    Ok(-acc)
}
