//! Columnar recurrent network.
//!
//! Each column owns a two-layer ReLU feature extractor fed with the input
//! and its own previous scalar state. A recurrence cell mixes the features
//! of every column (through the lateral mask) into one scalar state per
//! column, and a linear readout combines the states into a prediction.
//!
//! All parameters live in one flat buffer in canonical order: columns
//! ascending, and within a column `W1, b1, W2, b2, U-row, R-row` followed by
//! the update-gate and reset-gate rows for the GRU cell; the readout
//! weights `w` come last. Gradient estimators emit vectors in the same
//! order (without the readout block).

mod backward;
mod cell;
pub mod checkpoint;
mod column;
mod config;
mod layout;
mod mask;
mod net;
pub mod standard;

pub use backward::{state_jacobian, step_vjp};
pub use cell::{
    cell_forward_additive, cell_forward_gru, cell_forward_static, CellCache, CellParams, Gate,
};
pub use column::{column_forward, ColumnCache, ColumnParams};
pub use config::{CellKind, NetConfig};
pub use layout::{Group, Layout};
pub use mask::{lateral_count, mask_feasible, sample_mask, LateralMask};
pub use net::{build_network, predict, ColumnarNetwork, Sequence, StepRecord, StepTape};
