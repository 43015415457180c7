//! Meta-gradients through the LMS learning rule of the readout.
//!
//! The readout learns online with `w_i ← w_i + α_i·δ·h_i`, so `w(t)` depends
//! on θ. [`MetaTrace`] tracks `TW_i ≈ ∂w_i(t)/∂θ_i` next to the Master-User
//! trace, and [`meta_credit`] combines both. [`bptt_through_learning`] is the
//! exact reference that differentiates through every LMS update.

mod learner;
mod lms;
mod oracle;

pub use learner::{delta_grad, meta_accumulate, meta_credit, meta_trace_update, MetaLearner, MetaRun, MetaTrace};
pub use lms::{lms_step, run_with_lms, LmsConfig};
pub use oracle::{bptt_through_learning, finite_diff_through_learning, tbptt_through_learning};
