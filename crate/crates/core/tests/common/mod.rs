//! Shared fixtures and independent reference computations for the
//! integration tests.
#![allow(dead_code)]

use lmm_tails::rng::PathRng;
use lmm_tails::ModelConfig;

/// Two rates on `[2, 2.5, 3]`, flat 20% vols, perfectly correlated, 4% curve.
pub const BENCHMARK_TOML: &str = r#"
[tenor]
dates = [2.0, 2.5, 3.0]

[vols]
constant = [0.2, 0.2]

[correlation]
matrix = [[1.0, 1.0], [1.0, 1.0]]

[curve]
forwards = [0.04, 0.04]
"#;

/// Three uncorrelated rates; the last two accrue over half a year.
pub const THREE_RATE_TOML: &str = r#"
[tenor]
dates = [1.0, 1.5, 2.0, 2.5]

[vols]
constant = [0.2, 0.2, 0.2]

[correlation]
matrix = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

[curve]
forwards = [0.04, 0.04, 0.04]
"#;

/// Unit vols, unit accruals, unit forwards, perfectly correlated. Under the
/// terminal measure `log(F_1/F_2)` is `-∫ F_2/(1+F_2) ds`, so the Euler bias
/// of its mean is the left-Riemann error of a smooth integral.
pub const WEAK_TOML: &str = r#"
[tenor]
dates = [1.0, 2.0, 3.0]

[vols]
constant = [1.0, 1.0]

[correlation]
matrix = [[1.0, 1.0], [1.0, 1.0]]

[curve]
forwards = [1.0, 1.0]
"#;

pub fn config(text: &str) -> ModelConfig {
    ModelConfig::from_toml_str(text).expect("fixture config is valid")
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `ln E[exp(v (μ + σZ)²)]` for standard normal `Z` by direct quadrature of
/// the Gaussian integral around the integrand's peak. Requires `2vσ² < 1`.
pub fn ln_logsquare_moment_quadrature(mu: f64, sigma2: f64, v: f64) -> f64 {
    let s = sigma2.sqrt();
    let a = 1.0 - 2.0 * v * sigma2;
    assert!(a > 0.0, "quadrature oracle needs a finite moment");
    // exponent g(z) = v(μ+σz)² - z²/2 is a concave parabola
    let g = |z: f64| v * (mu + s * z).powi(2) - 0.5 * z * z;
    let peak = 2.0 * v * mu * s / a;
    let half_width = 40.0 / a.sqrt();
    let g_peak = g(peak);
    let integral = simpson(
        |z| (g(z) - g_peak).exp(),
        peak - half_width,
        peak + half_width,
        40_000,
    );
    g_peak + integral.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// `E[h(exp(m + s Z))]` by Simpson quadrature over `Z ∈ [-12, 12]`.
pub fn lognormal_expectation<H: Fn(f64) -> f64>(m: f64, s: f64, h: H) -> f64 {
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    simpson(|z| h((m + s * z).exp()) * phi(z), -12.0, 12.0, 4_000)
}

/// Exact mean of `log(F_1(1)/F_2(1))` for [`WEAK_TOML`]:
/// `-∫_0^1 E[F_2(s)/(1+F_2(s))] ds` with `F_2(s) = exp(-s/2 + √s Z)`.
pub fn weak_observable_exact() -> f64 {
    let m = |s: f64| lognormal_expectation(-0.5 * s, s.sqrt(), |x| x / (1.0 + x));
    -simpson(m, 0.0, 1.0, 400)
}

/// `exp(m + s Z)` draws on their own random streams.
pub fn lognormal_draws(m: f64, s: f64, n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .map(|p| (m + s * PathRng::new(seed, p as u64).normal()).exp())
        .collect()
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical KS distance at significance `alpha` (asymptotic).
pub fn ks_critical(alpha: f64, na: usize, nb: usize) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}
