//! Estimators built on simulated samples: the exp-log-square moment, the
//! critical-exponent scan, the log-survival tail fit, the Black caplet value
//! and the product bound of the measure-change chain.

mod black;
mod bound;
mod moment;
pub mod report;
mod scan;
mod tail;

pub use black::black_caplet_value;
pub use bound::{check_product_bound, ProductBoundCheck};
pub use moment::{estimate_logsquare_moment, estimate_logsquare_moment_about, MomentEstimate};
pub use scan::{
    classify_point, scan_critical_exponent, MomentScanReport, SampleSource, ScanPoint,
    ScanSettings, ScanThresholds, Verdict, WeightedSample,
};
pub use tail::{fit_tail_slope, fit_tail_slope_about, TailFitReport, MIN_TAIL_POINTS};
