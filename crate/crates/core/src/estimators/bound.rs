use super::moment::MomentEstimate;
use super::scan::{ScanContext, ScanThresholds, Verdict};
use crate::error::{Error, Result};
use crate::model::{MeasureId, ModelConfig};
use crate::simulation::{rn_weights, TerminalSample};

/// Both sides of `E^M[φ(F_n)^v] <= E^n[φ(F_n)^v] · Π_{i>n} (1 + τ_i F_i(0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductBoundCheck {
    pub lhs: MomentEstimate,
    /// `E^n[φ(F_n)^v]`, the reweighted inner expectation.
    pub inner: MomentEstimate,
    /// `Π_{i=n+1}^{M} (1 + τ_i F_i(0))`.
    pub factor: f64,
    pub rhs: f64,
    pub rhs_std_error: f64,
    /// `lhs <= rhs` up to three combined standard errors.
    pub holds: bool,
}

impl ProductBoundCheck {
    pub fn combined_std_error(&self) -> f64 {
        self.lhs.std_error.hypot(self.rhs_std_error)
    }
}

/// Estimates both sides of the product bound on a terminal-measure sample at
/// time `t`, with `φ(x) = exp(log²(x / center))`.
///
/// Refuses any `v` that the scan classifier does not mark convergent on
/// either side, since the estimates carry no information there.
pub fn check_product_bound(
    config: &ModelConfig,
    n: usize,
    t: f64,
    v: f64,
    sample: &TerminalSample,
    center: f64,
    thresholds: &ScanThresholds,
) -> Result<ProductBoundCheck> {
    let m = config.num_rates();
    let target = MeasureId::new(n, m)?;
    if (sample.horizon() - t).abs() > 1e-12 * t.abs().max(1.0) {
        return Err(Error::domain(format!(
            "sample simulated to {}, bound requested at t={t}",
            sample.horizon()
        )));
    }
    let values = sample.rate(n);
    let weights = rn_weights(sample, config, target)?;

    let lhs = ScanContext::new(&values, None, center)?.evaluate(v, thresholds);
    let inner = ScanContext::new(&values, Some(&weights), center)?.evaluate(v, thresholds);
    for (side, point) in [("E^M side", &lhs), ("E^n side", &inner)] {
        if point.verdict != Verdict::Convergent {
            return Err(Error::domain(format!(
                "v={v} is {} on the {side}; the bound is only checked inside the convergent region",
                point.verdict
            )));
        }
    }

    let factor: f64 = (n + 1..=m)
        .map(|i| 1.0 + config.tenor().tau(i) * config.curve().forward(i))
        .product();
    let rhs = factor * inner.estimate.estimate;
    let rhs_std_error = factor * inner.estimate.std_error;
    let slack = 3.0 * lhs.estimate.std_error.hypot(rhs_std_error);
    Ok(ProductBoundCheck {
        lhs: lhs.estimate,
        inner: inner.estimate,
        factor,
        rhs,
        rhs_std_error,
        holds: lhs.estimate.estimate <= rhs + slack,
    })
}
