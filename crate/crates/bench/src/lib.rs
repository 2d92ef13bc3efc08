//! Fixtures shared by the criterion benchmarks under `benches/`.

use lmm_tails::rng::PathRng;
use lmm_tails::ModelConfig;

/// Two perfectly correlated rates on `[2, 2.5, 3]`, 20% vols, 4% curve.
pub fn benchmark_config() -> ModelConfig {
    ModelConfig::from_toml_str(
        r#"
[tenor]
dates = [2.0, 2.5, 3.0]
[vols]
constant = [0.2, 0.2]
[correlation]
matrix = [[1.0, 1.0], [1.0, 1.0]]
[curve]
forwards = [0.04, 0.04]
"#,
    )
    .expect("benchmark config is valid")
}

/// Five rates with exponentially decaying correlation.
pub fn five_rate_config() -> ModelConfig {
    ModelConfig::from_toml_str(
        r#"
[tenor]
dates = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5]
[vols]
constant = [0.25, 0.22, 0.2, 0.18, 0.16]
[correlation]
beta = 0.1
[curve]
forwards = [0.03, 0.035, 0.04, 0.045, 0.05]
"#,
    )
    .expect("five-rate config is valid")
}

/// `n` draws of `exp(0.2 Z)`.
pub fn lognormal_sample(n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .map(|p| (0.2 * PathRng::new(seed, p as u64).normal()).exp())
        .collect()
}
