//! Static model data and its closed-form quantities.

mod analytic;
mod config;
mod correlation;
mod tenor;
mod vol;

pub use analytic::{
    critical_exponent, cumulative_variance, frozen_drift_integral, ln_lognormal_logsquare_moment,
    lognormal_logsquare_moment, terminal_drift, LogSquareMoment,
};
pub use config::{load_config, InitialCurve, MeasureId, ModelConfig};
pub use correlation::{cholesky_factor, CorrelationMatrix, LowerTriangular};
pub use tenor::TenorStructure;
pub use vol::{PiecewiseConstant, VolTermStructure};
