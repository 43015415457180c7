use super::check_record;
use crate::error::Result;
use crate::network::{step_vjp, ColumnarNetwork, Layout, StepRecord};

/// Per-column one-step derivatives at step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGrads {
    /// Group `i` block holds `∂h_i(t)/∂θ_i(t)`; laid out like θ.
    pub d_theta: Vec<f64>,
    /// `∂h_i(t)/∂h_i(t−1)` for each column.
    pub d_hprev: Vec<f64>,
}

impl LocalGrads {
    pub fn group<'a>(&'a self, layout: &Layout, i: usize) -> &'a [f64] {
        &self.d_theta[layout.group_range(i)]
    }
}

/// One backward pass from `Σ_k h_k(t)` with gradient stopped on every
/// lateral edge. Because every lateral edge into `h_j` is cut, group `i`
/// only receives gradient from its own state.
pub fn local_grads_single_pass(net: &ColumnarNetwork, rec: &StepRecord) -> Result<LocalGrads> {
    check_record(net, rec)?;
    let l = net.layout();
    let mut d_theta = vec![0.0; l.theta_len()];
    let ones = vec![1.0; l.columns];
    let d_hprev = step_vjp(net, rec, &ones, true, Some(&mut d_theta));
    Ok(LocalGrads { d_theta, d_hprev })
}

/// `C` ordinary backward passes, one from each `h_i(t)`, keeping only the
/// `θ_i` block and the `h_i(t−1)` entry of each.
pub fn local_grads_per_state(net: &ColumnarNetwork, rec: &StepRecord) -> Result<LocalGrads> {
    check_record(net, rec)?;
    let l = net.layout();
    let c = l.columns;
    let mut d_theta = vec![0.0; l.theta_len()];
    let mut d_hprev = vec![0.0; c];
    for i in 0..c {
        let mut seed = vec![0.0; c];
        seed[i] = 1.0;
        let mut scratch = vec![0.0; l.theta_len()];
        let adj = step_vjp(net, rec, &seed, false, Some(&mut scratch));
        let r = l.group_range(i);
        d_theta[r.clone()].copy_from_slice(&scratch[r]);
        d_hprev[i] = adj[i];
    }
    Ok(LocalGrads { d_theta, d_hprev })
}
