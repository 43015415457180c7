//! Experiment harness: synthetic data, the alignment experiments, the
//! information-decay probe, summaries and CSV output.
//!
//! Every run is a pure function of its [`ExperimentConfig`]. Seed `k`
//! derives `root.fork(k)`; its fork 0 seeds weights, fork 1 the mask and
//! fork 2 the data, so estimators, lateral ratios and step sizes are all
//! compared on the same weights and data. Seeds run in parallel on the
//! current rayon pool and come back in job order.

mod config;
mod data;
mod decay;
mod experiments;
mod output;
mod summary;

pub use config::{appendix_grid, Estimator, Experiment, ExperimentConfig, DEFAULT_LATERAL_RATIOS};
pub use data::{gen_sequence, SequenceSpec};
pub use decay::{run_decay, DecayConfig, DecayRow};
pub use experiments::{
    feasible_ratios, instance, run_align_meta, run_align_rnn, run_experiment, run_meta_ablation, run_stepsize_sweep, AlignmentRow,
};
pub use output::{read_decay, read_rows, read_summary, write_decay, write_rows, write_summary};
pub use summary::{summarize, SummaryRow};
