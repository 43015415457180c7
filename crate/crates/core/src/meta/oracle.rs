use super::{run_with_lms, LmsConfig};
use crate::credit::{finite_diff_with, reverse_accumulate, truncated_accumulate, FiniteDiff, GradEstimate};
use crate::error::Result;
use crate::network::{ColumnarNetwork, Sequence};

/// Exact gradient of `Σ_t ½δ(t)²` w.r.t. θ with every LMS update of `w`
/// in the graph. The readout block is w.r.t. the initial readout.
pub fn bptt_through_learning(net: &ColumnarNetwork, seq: &Sequence, cfg: &LmsConfig) -> Result<GradEstimate> {
    let tape = run_with_lms(net, seq, cfg)?;
    reverse_accumulate(net, &tape, Some(&cfg.step_sizes))
}

/// Truncated variant: each loss is differentiated through the last `k`
/// steps, including the LMS updates inside that window.
pub fn tbptt_through_learning(net: &ColumnarNetwork, seq: &Sequence, cfg: &LmsConfig, k: usize) -> Result<GradEstimate> {
    let tape = run_with_lms(net, seq, cfg)?;
    truncated_accumulate(net, &tape, Some(&cfg.step_sizes), k)
}

/// Central differences of the LMS-replayed loss.
pub fn finite_diff_through_learning(net: &ColumnarNetwork, seq: &Sequence, cfg: &LmsConfig, eps: f64) -> Result<FiniteDiff> {
    finite_diff_with(net, eps, |n| run_with_lms(n, seq, cfg))
}
