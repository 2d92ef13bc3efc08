use crate::error::{Error, Result};
use crate::model::TenorStructure;

/// Monte Carlo run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    /// Horizon `t*` in years.
    pub horizon: f64,
    pub steps_per_year: u32,
    pub n_paths: usize,
    pub seed: u64,
    pub antithetic: bool,
    /// Refuse horizons past `T_{M-1}`, where the terminal rate fixes.
    pub require_all_live: bool,
}

impl SimulationPlan {
    pub fn new(horizon: f64, n_paths: usize, seed: u64) -> Self {
        Self {
            horizon,
            steps_per_year: 64,
            n_paths,
            seed,
            antithetic: false,
            require_all_live: false,
        }
    }

    pub fn with_steps_per_year(mut self, steps: u32) -> Self {
        self.steps_per_year = steps;
        self
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn with_all_live(mut self, on: bool) -> Self {
        self.require_all_live = on;
        self
    }

    pub fn validate(&self, tenor: &TenorStructure) -> Result<()> {
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(Error::domain(format!(
                "horizon must be finite and nonnegative, got {}",
                self.horizon
            )));
        }
        if self.steps_per_year == 0 {
            return Err(Error::domain("steps_per_year must be positive"));
        }
        if self.n_paths == 0 {
            return Err(Error::domain("n_paths must be positive"));
        }
        if self.antithetic && !self.n_paths.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "antithetic sampling needs an even path count, got {}",
                self.n_paths
            )));
        }
        let m = tenor.num_rates();
        if self.require_all_live && self.horizon > tenor.expiry(m) {
            return Err(Error::domain(format!(
                "horizon {} beyond T_(M-1) = {}: the terminal rate would be expired",
                self.horizon,
                tenor.expiry(m)
            )));
        }
        Ok(())
    }

    /// Uniform grid `k / steps_per_year` up to the horizon, merged with the
    /// horizon itself and every tenor date not after it.
    pub fn time_grid(&self, tenor: &TenorStructure) -> Vec<f64> {
        let h = 1.0 / f64::from(self.steps_per_year);
        let mut grid: Vec<f64> = (0..)
            .map(|k| k as f64 * h)
            .take_while(|&t| t < self.horizon)
            .collect();
        grid.push(self.horizon);
        grid.extend(tenor.dates().iter().copied().filter(|&d| d <= self.horizon));
        grid.sort_by(|a, b| a.total_cmp(b));
        // merge points closer than rounding noise
        grid.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * a.abs().max(1.0));
        grid
    }
}
