//! Online gradient estimation for columnar recurrent networks.
//!
//! A columnar network splits its parameters into per-column groups, each
//! owning one scalar recurrent state. The [`credit`] module keeps a running
//! trace of how each group influences its own column's state, which yields
//! a linear-cost gradient estimate that is exact when columns are isolated.
//! [`meta`] extends the same trace to gradients flowing through online LMS
//! updates of the readout weights. Exact references (full BPTT, truncated
//! BPTT, dense RTRL, central finite differences) live next to the estimators
//! so every approximation can be measured, and [`bench`] packages the
//! measurements as seeded, reproducible experiments.

pub mod bench;
pub mod credit;
pub mod error;
pub mod meta;
pub mod network;
pub mod numkit;

pub use error::{Error, Result};
