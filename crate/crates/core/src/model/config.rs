use super::correlation::CorrelationMatrix;
use super::tenor::TenorStructure;
use super::vol::{PiecewiseConstant, VolTermStructure};
use crate::error::{Error, Result};
use serde::Deserialize;
use std::path::Path;

/// Initial forward curve `F_1(0)..F_M(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCurve {
    forwards: Vec<f64>,
}

impl InitialCurve {
    pub fn new(forwards: Vec<f64>) -> Result<Self> {
        if forwards.is_empty() {
            return Err(Error::config("curve.forwards", "empty curve"));
        }
        if let Some((i, &f)) = forwards
            .iter()
            .enumerate()
            .find(|(_, f)| !f.is_finite() || **f <= 0.0)
        {
            return Err(Error::config(
                format!("curve.forwards[{i}]"),
                format!("forward rates must be strictly positive, got {f}"),
            ));
        }
        Ok(Self { forwards })
    }

    /// `F_n(0)` for rate `n` (1-based).
    pub fn forward(&self, n: usize) -> f64 {
        self.forwards[n - 1]
    }

    pub fn forwards(&self) -> &[f64] {
        &self.forwards
    }
}

/// Selects the `T_k`-forward measure `Q^k`, `1 <= k <= M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeasureId(usize);

impl MeasureId {
    pub fn new(k: usize, num_rates: usize) -> Result<Self> {
        if k == 0 || k > num_rates {
            return Err(Error::domain(format!(
                "measure index {k} outside 1..={num_rates}"
            )));
        }
        Ok(Self(k))
    }

    pub fn terminal(num_rates: usize) -> Self {
        Self(num_rates)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// Complete static model: tenor, volatilities, correlations and initial curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    tenor: TenorStructure,
    vols: VolTermStructure,
    corr: CorrelationMatrix,
    curve: InitialCurve,
}

impl ModelConfig {
    pub fn new(
        tenor: TenorStructure,
        vols: VolTermStructure,
        corr: CorrelationMatrix,
        curve: InitialCurve,
    ) -> Result<Self> {
        let m = tenor.num_rates();
        if vols.num_rates() != m {
            return Err(Error::config(
                "vols",
                format!("expected {m} volatility curves, got {}", vols.num_rates()),
            ));
        }
        if corr.dim() != m {
            return Err(Error::config(
                "correlation",
                format!("expected a {m}x{m} matrix, got {0}x{0}", corr.dim()),
            ));
        }
        if curve.forwards().len() != m {
            return Err(Error::config(
                "curve.forwards",
                format!("expected {m} forwards, got {}", curve.forwards().len()),
            ));
        }
        for n in 1..=m {
            let end = vols.curve(n).end();
            if end < tenor.expiry(n) {
                return Err(Error::config(
                    format!("vols.rate[{}]", n - 1),
                    format!(
                        "sigma_{n} defined up to {end}, must cover the rate's lifetime [0, {}]",
                        tenor.expiry(n)
                    ),
                ));
            }
        }
        Ok(Self {
            tenor,
            vols,
            corr,
            curve,
        })
    }

    pub fn num_rates(&self) -> usize {
        self.tenor.num_rates()
    }

    pub fn tenor(&self) -> &TenorStructure {
        &self.tenor
    }

    pub fn vols(&self) -> &VolTermStructure {
        &self.vols
    }

    pub fn corr(&self) -> &CorrelationMatrix {
        &self.corr
    }

    pub fn curve(&self) -> &InitialCurve {
        &self.curve
    }

    pub(crate) fn check_rate(&self, n: usize) -> Result<()> {
        self.vols.check_index(n)
    }

    /// Parses the TOML configuration format (sections `tenor`, `vols`,
    /// `correlation`, `curve`).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| format!("byte {}", s.start))
                .unwrap_or_else(|| "<file>".into());
            Error::config(field, e.message().to_string())
        })?;
        raw.build()
    }
}

/// Reads and validates a model configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ModelConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    ModelConfig::from_toml_str(&text)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    tenor: RawTenor,
    vols: RawVols,
    correlation: RawCorrelation,
    curve: RawCurve,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTenor {
    dates: Vec<f64>,
    year_fractions: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVols {
    /// One flat level per rate, defined over the whole tenor.
    constant: Option<Vec<f64>>,
    /// Per rate, `[end, level]` pairs.
    rate: Option<Vec<RawStepCurve>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStepCurve {
    segments: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorrelation {
    matrix: Option<Vec<Vec<f64>>>,
    beta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    forwards: Vec<f64>,
}

impl RawConfig {
    fn build(self) -> Result<ModelConfig> {
        let tenor = TenorStructure::new(self.tenor.dates, self.tenor.year_fractions)?;
        let m = tenor.num_rates();
        let horizon = tenor.date(m);

        let vols = match (self.vols.constant, self.vols.rate) {
            (Some(levels), None) => VolTermStructure::constant(&levels, horizon)
                .map_err(|e| relabel(e, "vols.constant"))?,
            (None, Some(rates)) => {
                let curves = rates
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let (ends, levels) = r.segments.iter().map(|s| (s[0], s[1])).unzip();
                        PiecewiseConstant::new(ends, levels)
                            .map_err(|e| relabel(e, &format!("vols.rate[{i}].segments")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                VolTermStructure::new(curves)
            }
            _ => {
                return Err(Error::config(
                    "vols",
                    "give exactly one of `constant` or `rate`",
                ))
            }
        };

        let corr = match (self.correlation.matrix, self.correlation.beta) {
            (Some(rows), None) => CorrelationMatrix::from_rows(&rows)?,
            (None, Some(beta)) => {
                let resets: Vec<f64> = (1..=m).map(|n| tenor.expiry(n)).collect();
                CorrelationMatrix::exponential(beta, &resets)?
            }
            _ => {
                return Err(Error::config(
                    "correlation",
                    "give exactly one of `matrix` or `beta`",
                ))
            }
        };

        let curve = InitialCurve::new(self.curve.forwards)?;
        ModelConfig::new(tenor, vols, corr, curve)
    }
}

fn relabel(err: Error, field: &str) -> Error {
    match err {
        Error::Domain(reason) => Error::config(field, reason),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BENCHMARK: &str = r#"
[tenor]
dates = [2.0, 2.5, 3.0]

[vols]
constant = [0.2, 0.2]

[correlation]
matrix = [[1.0, 1.0], [1.0, 1.0]]

[curve]
forwards = [0.04, 0.04]
"#;

    #[test]
    fn loads_benchmark() {
        let cfg = ModelConfig::from_toml_str(BENCHMARK).unwrap();
        assert_eq!(cfg.num_rates(), 2);
        assert_eq!(cfg.tenor().tau(2), 0.5);
        assert_eq!(cfg.curve().forward(1), 0.04);
        assert_eq!(cfg.corr().get(0, 1), 1.0);
    }

    #[test]
    fn loads_minimal_single_rate() {
        let text = r#"
[tenor]
dates = [1.0, 1.5]
[vols]
constant = [0.25]
[correlation]
matrix = [[1.0]]
[curve]
forwards = [0.03]
"#;
        let cfg = ModelConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.num_rates(), 1);
    }

    #[test]
    fn step_vols_and_beta_correlation() {
        let text = r#"
[tenor]
dates = [1.0, 2.0, 3.0]
year_fractions = [1.01, 0.99]
[[vols.rate]]
segments = [[1.0, 0.3], [3.0, 0.1]]
[[vols.rate]]
segments = [[3.0, 0.2]]
[correlation]
beta = 0.1
[curve]
forwards = [0.03, 0.035]
"#;
        let cfg = ModelConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.vols().sigma(1, 1.5).unwrap(), 0.1);
        assert!((cfg.corr().get(0, 1) - (-0.1f64).exp()).abs() < 1e-15);
        assert_eq!(cfg.tenor().tau(1), 1.01);
    }

    #[test]
    fn ordering_error_names_field() {
        let text = BENCHMARK.replace("[2.0, 2.5, 3.0]", "[2.0, 1.5, 3.0]");
        match ModelConfig::from_toml_str(&text) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "tenor.dates[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_psd_reports_eigenvalue() {
        let text = r#"
[tenor]
dates = [1.0, 2.0, 3.0, 4.0]
[vols]
constant = [0.2, 0.2, 0.2]
[correlation]
matrix = [[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]]
[curve]
forwards = [0.03, 0.03, 0.03]
"#;
        let err = ModelConfig::from_toml_str(text).unwrap_err();
        assert!(matches!(err, Error::NotCorrelation { .. }));
        assert!(err.to_string().contains("eigenvalue"));
    }

    #[test]
    fn dimension_mismatch() {
        let text = BENCHMARK.replace("forwards = [0.04, 0.04]", "forwards = [0.04]");
        assert!(matches!(
            ModelConfig::from_toml_str(&text),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn short_vol_domain_rejected() {
        let text = BENCHMARK.replace(
            "[vols]\nconstant = [0.2, 0.2]",
            "[[vols.rate]]\nsegments = [[1.0, 0.2]]\n[[vols.rate]]\nsegments = [[3.0, 0.2]]",
        );
        match ModelConfig::from_toml_str(&text) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "vols.rate[0]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn measure_bounds() {
        assert!(MeasureId::new(0, 3).is_err());
        assert!(MeasureId::new(4, 3).is_err());
        assert_eq!(MeasureId::new(3, 3).unwrap(), MeasureId::terminal(3));
    }
}
