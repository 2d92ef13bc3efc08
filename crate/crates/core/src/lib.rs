//! Monte Carlo engine and tail diagnostics for the log-normal LIBOR market
//! model.
//!
//! Forward rates are simulated under the terminal measure with a log-Euler
//! scheme, the frozen-drift approximation is sampled exactly, and likelihood
//! ratios move expectations to any other forward measure. The estimators
//! locate the critical exponent of `E[exp(v log² F_n(t))]`, which for a
//! log-normal rate equals `1 / (2 ∫_0^t σ_n(s)² ds)`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod model;
pub mod normal;
pub mod rng;
pub mod simulation;
pub mod sum;

pub use error::{Error, Result};
pub use estimators::{
    black_caplet_value, check_product_bound, estimate_logsquare_moment,
    estimate_logsquare_moment_about, fit_tail_slope, fit_tail_slope_about, scan_critical_exponent,
    MomentEstimate, MomentScanReport, ScanSettings, ScanThresholds, TailFitReport, Verdict,
};
pub use model::{
    cholesky_factor, critical_exponent, cumulative_variance, frozen_drift_integral, load_config,
    lognormal_logsquare_moment, terminal_drift, CorrelationMatrix, InitialCurve, LogSquareMoment,
    MeasureId, ModelConfig, TenorStructure, VolTermStructure,
};
pub use simulation::{
    reweighted_expectation, rn_weight_to_measure, sample_frozen_drift, simulate_terminal_measure,
    SimulationPlan, TerminalSample,
};
