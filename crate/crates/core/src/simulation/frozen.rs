use crate::error::Result;
use crate::model::{cumulative_variance, frozen_drift_integral, ModelConfig};
use crate::rng::PathRng;
use rayon::prelude::*;

/// Log-mean and log-variance of the frozen-drift rate `F_n^fd(t)`.
pub fn frozen_drift_log_moments(config: &ModelConfig, n: usize, t: f64) -> Result<(f64, f64)> {
    let drift = frozen_drift_integral(config, n, t)?;
    let var = cumulative_variance(config.vols(), n, t)?;
    Ok((config.curve().forward(n).ln() + drift - 0.5 * var, var))
}

/// Exact draws of `F_n^fd(t)`, which is log-normal with the moments of
/// [`frozen_drift_log_moments`]. Draw `p` uses random stream `p`.
pub fn sample_frozen_drift(
    config: &ModelConfig,
    n: usize,
    t: f64,
    n_paths: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let (mean, var) = frozen_drift_log_moments(config, n, t)?;
    let sd = var.sqrt();
    Ok((0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = PathRng::new(seed, p as u64);
            (mean + sd * rng.normal()).exp()
        })
        .collect())
}
