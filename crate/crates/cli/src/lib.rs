//! Batch front end for the `lmm-tails` engine: resolves a [`RunSpec`], runs
//! one command and writes CSV/text artifacts into a per-run directory.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod run;
mod spec;

pub use run::{run, RunOutcome};
pub use spec::{parse_quantiles, Command, Measure, RunSpec, Sampler, VGrid};
