use crate::error::{Error, Result};

/// Tenor dates `T_0 < T_1 < ... < T_M` and the accrual fractions `τ_1..τ_M`.
///
/// Rate `n` (1-based) accrues over `[T_{n-1}, T_n]` and fixes at `T_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TenorStructure {
    dates: Vec<f64>,
    year_fractions: Vec<f64>,
}

impl TenorStructure {
    /// Builds a tenor structure. Missing year fractions default to the date
    /// differences `T_n - T_{n-1}`.
    pub fn new(dates: Vec<f64>, year_fractions: Option<Vec<f64>>) -> Result<Self> {
        if dates.len() < 2 {
            return Err(Error::config(
                "tenor.dates",
                "need at least two dates (M >= 1)",
            ));
        }
        for (i, &d) in dates.iter().enumerate() {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::config(
                    format!("tenor.dates[{i}]"),
                    format!("dates must be finite and positive, got {d}"),
                ));
            }
            if i > 0 && d <= dates[i - 1] {
                return Err(Error::config(
                    format!("tenor.dates[{i}]"),
                    format!(
                        "dates must be strictly increasing, got {d} after {}",
                        dates[i - 1]
                    ),
                ));
            }
        }
        let year_fractions = match year_fractions {
            Some(tau) => {
                if tau.len() != dates.len() - 1 {
                    return Err(Error::config(
                        "tenor.year_fractions",
                        format!("expected {} entries, got {}", dates.len() - 1, tau.len()),
                    ));
                }
                if let Some((i, &t)) = tau
                    .iter()
                    .enumerate()
                    .find(|(_, t)| !t.is_finite() || **t <= 0.0)
                {
                    return Err(Error::config(
                        format!("tenor.year_fractions[{i}]"),
                        format!("year fractions must be positive, got {t}"),
                    ));
                }
                tau
            }
            None => dates.windows(2).map(|w| w[1] - w[0]).collect(),
        };
        Ok(Self {
            dates,
            year_fractions,
        })
    }

    /// Number of forward rates `M`.
    pub fn num_rates(&self) -> usize {
        self.year_fractions.len()
    }

    /// Tenor date `T_i`, `i` in `0..=M`.
    pub fn date(&self, i: usize) -> f64 {
        self.dates[i]
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    /// Accrual fraction `τ_n` of rate `n` (1-based).
    pub fn tau(&self, n: usize) -> f64 {
        self.year_fractions[n - 1]
    }

    pub fn year_fractions(&self) -> &[f64] {
        &self.year_fractions
    }

    /// Fixing date `T_{n-1}` of rate `n` (1-based); the rate is frozen from then on.
    pub fn expiry(&self, n: usize) -> f64 {
        self.dates[n - 1]
    }
}
