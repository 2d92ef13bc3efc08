use super::moment::validate_inputs;
use crate::error::{Error, Result};
use crate::sum::KahanSum;

/// Fewest survival points accepted inside the quantile window.
pub const MIN_TAIL_POINTS: usize = 1000;

/// Least-squares fit of `-log S(x) ≈ slope · log²(x / c) + intercept` over
/// an upper quantile window. For a log-normal tail the slope approaches
/// `1 / (2σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFitReport {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub quantile_lo: f64,
    pub quantile_hi: f64,
    pub points: usize,
}

/// Regresses the empirical log-survival function on `log² x` between the
/// quantiles `quantile_lo` and `quantile_hi`.
pub fn fit_tail_slope(
    samples: &[f64],
    weights: Option<&[f64]>,
    quantile_lo: f64,
    quantile_hi: f64,
) -> Result<TailFitReport> {
    fit_tail_slope_about(samples, weights, quantile_lo, quantile_hi, 1.0)
}

/// As [`fit_tail_slope`] with `log²(x / center)` as the regressor.
pub fn fit_tail_slope_about(
    samples: &[f64],
    weights: Option<&[f64]>,
    quantile_lo: f64,
    quantile_hi: f64,
    center: f64,
) -> Result<TailFitReport> {
    if !(0.9 < quantile_lo && quantile_lo < quantile_hi && quantile_hi < 1.0) {
        return Err(Error::domain(format!(
            "quantile window ({quantile_lo}, {quantile_hi}) must satisfy 0.9 < lo < hi < 1"
        )));
    }
    if !(center > 0.0) || !center.is_finite() {
        return Err(Error::domain(format!(
            "center must be positive, got {center}"
        )));
    }
    validate_inputs(samples, weights)?;

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].total_cmp(&samples[b]));
    let w_at = |i: usize| weights.map_or(1.0, |w| w[i]);
    let total: f64 = (0..samples.len()).map(w_at).collect::<KahanSum>().value();

    // walk from the top: survival at x = weight strictly above x
    let lc = center.ln();
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut above = KahanSum::new();
    let mut k = order.len();
    while k > 0 {
        let x = samples[order[k - 1]];
        let mut tie = KahanSum::new();
        while k > 0 && samples[order[k - 1]] == x {
            tie.add(w_at(order[k - 1]));
            k -= 1;
        }
        let survival = above.value() / total;
        let cdf = 1.0 - survival;
        if cdf > quantile_lo && cdf < quantile_hi && survival > 0.0 {
            let l = x.ln() - lc;
            points.push((l * l, -survival.ln()));
        }
        above.add(tie.value());
    }

    if points.len() < MIN_TAIL_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} survival points in the quantile window ({quantile_lo}, {quantile_hi}), need {MIN_TAIL_POINTS}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData(
            "degenerate regressor: no spread in log² x".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    if !(slope > 0.0) {
        return Err(Error::InsufficientData(format!(
            "fitted tail slope {slope} is not positive; the window is not in a decaying tail"
        )));
    }
    Ok(TailFitReport {
        slope,
        intercept,
        r_squared,
        quantile_lo,
        quantile_hi,
        points: points.len(),
    })
}
