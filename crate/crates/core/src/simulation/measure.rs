use super::terminal::TerminalSample;
use crate::error::{Error, Result};
use crate::model::{MeasureId, ModelConfig};
use crate::sum;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `|estimate - target| <= k * std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.std_error
    }
}

fn check_live(sample: &TerminalSample, config: &ModelConfig, target: MeasureId) -> Result<()> {
    let m = config.num_rates();
    if sample.num_rates() != m {
        return Err(Error::State(format!(
            "sample carries {} rates, model has {m}",
            sample.num_rates()
        )));
    }
    for i in target.index() + 1..=m {
        let expiry = config.tenor().expiry(i);
        if sample.horizon() > expiry {
            return Err(Error::State(format!(
                "F_{i} fixed at {expiry} before the sample time {}; its value is not available",
                sample.horizon()
            )));
        }
    }
    Ok(())
}

/// Density `dQ^n/dQ^M` on `F_t` for path `p`:
/// `Π_{i=n+1}^{M} (1 + τ_i F_i(t)) / (1 + τ_i F_i(0))`.
///
/// Exactly 1 for the terminal measure.
pub fn rn_weight_to_measure(
    sample: &TerminalSample,
    p: usize,
    config: &ModelConfig,
    target: MeasureId,
) -> Result<f64> {
    check_live(sample, config, target)?;
    Ok(weight(sample.path(p), config, target.index()))
}

/// [`rn_weight_to_measure`] for every path.
pub fn rn_weights(
    sample: &TerminalSample,
    config: &ModelConfig,
    target: MeasureId,
) -> Result<Vec<f64>> {
    check_live(sample, config, target)?;
    Ok(sample
        .paths()
        .map(|row| weight(row, config, target.index()))
        .collect())
}

#[inline]
fn weight(row: &[f64], config: &ModelConfig, n: usize) -> f64 {
    let tenor = config.tenor();
    let curve = config.curve();
    (n + 1..=config.num_rates())
        .map(|i| {
            let tau = tenor.tau(i);
            (1.0 + tau * row[i - 1]) / (1.0 + tau * curve.forward(i))
        })
        .product()
}

/// `E^n[g]` estimated as the `Q^M` sample mean of `g · dQ^n/dQ^M`.
///
/// Antithetic pairs are averaged before the standard error is formed.
pub fn reweighted_expectation<F>(
    sample: &TerminalSample,
    weights: &[f64],
    payoff: F,
) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64,
{
    if sample.n_paths() == 0 {
        return Err(Error::domain("empty sample"));
    }
    if weights.len() != sample.n_paths() {
        return Err(Error::domain(format!(
            "{} weights for {} paths",
            weights.len(),
            sample.n_paths()
        )));
    }
    let terms: Vec<f64> = sample
        .paths()
        .zip(weights)
        .map(|(row, w)| payoff(row) * w)
        .collect();
    Ok(mean_estimate(&terms, sample.is_antithetic()))
}

pub fn mean_estimate(terms: &[f64], antithetic: bool) -> Estimate {
    let units: Vec<f64> = if antithetic {
        terms.chunks_exact(2).map(|c| 0.5 * (c[0] + c[1])).collect()
    } else {
        terms.to_vec()
    };
    let (mean, sd) = sum::mean_and_sd(&units);
    Estimate {
        estimate: mean,
        std_error: sd / (units.len() as f64).sqrt(),
    }
}
