//! Monte Carlo paths under the terminal measure, exact frozen-drift draws and
//! the change of measure to the other forward measures.

mod frozen;
mod measure;
mod plan;
mod terminal;

pub use frozen::{frozen_drift_log_moments, sample_frozen_drift};
pub use measure::{
    mean_estimate, reweighted_expectation, rn_weight_to_measure, rn_weights, Estimate,
};
pub use plan::SimulationPlan;
pub use terminal::{simulate_terminal_measure, MarketState, TerminalSample};
