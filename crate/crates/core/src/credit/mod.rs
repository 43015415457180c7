//! Credit assignment: the online Master-User estimator and its exact
//! references.
//!
//! * [`local_grads_single_pass`] gets every column's `∂h_i(t)/∂θ_i(t)` and
//!   `∂h_i(t)/∂h_i(t−1)` from one stop-gradient backward pass.
//! * [`master_user_update`] folds them into the per-column trace
//!   `T_i ≈ ∂h_i(t)/∂θ_i`, and [`master_user_credit`] turns the trace into a
//!   gradient estimate, `−δ(t)·w_i·T_i` per column.
//! * [`bptt_full`], [`tbptt`], [`RtrlState`] and [`finite_diff`] compute
//!   exact (or exactly truncated) gradients of `Σ_t ½δ(t)²` for comparison.

mod bptt;
mod dump;
mod estimate;
mod finite_diff;
mod local;
mod rtrl;
mod trace;

pub use bptt::{bptt_full, reverse_accumulate, tbptt, truncated_accumulate};
pub use dump::write_grad_dump;
pub use estimate::{alignment_percent, mean_abs_error, rel_inf_deviation, GradEstimate};
pub use finite_diff::{finite_diff, finite_diff_with, FiniteDiff};
pub use local::{local_grads_per_state, local_grads_single_pass, LocalGrads};
pub use rtrl::{rtrl_accumulate, rtrl_full, RtrlState, RTRL_MAX_PARAMS};
pub use trace::{master_user_accumulate, master_user_credit, master_user_update, MasterUser, MasterUserTrace};

use crate::error::{check_len, Error, Result};
use crate::network::{ColumnarNetwork, StepRecord, StepTape};

/// Checks that a step record was produced by a network shaped like `net`.
pub(crate) fn check_record(net: &ColumnarNetwork, rec: &StepRecord) -> Result<()> {
    let l = net.layout();
    let cw = l.columns * l.width;
    let ok = rec.x.len() == l.input_dim
        && rec.h_prev.len() == l.columns
        && rec.h.len() == l.columns
        && rec.w.len() == l.columns
        && rec.a1.len() == cw
        && rec.a2.len() == cw
        && rec.f.len() == cw;
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidState("step record does not match the network shape".into()))
    }
}

pub(crate) fn check_tape(net: &ColumnarNetwork, tape: &StepTape) -> Result<()> {
    for rec in tape.records() {
        check_record(net, rec)?;
    }
    Ok(())
}

pub(crate) fn check_alphas(net: &ColumnarNetwork, alphas: Option<&[f64]>) -> Result<()> {
    if let Some(a) = alphas {
        check_len("step sizes", net.layout().columns, a.len())?;
    }
    Ok(())
}
