use super::GradEstimate;
use crate::error::{Error, Result};
use crate::network::{ColumnarNetwork, StepTape};

/// Central-difference gradient with per-component kink flags.
#[derive(Debug, Clone)]
pub struct FiniteDiff {
    pub grad: GradEstimate,
    /// True where either perturbation changed some ReLU's active set; the
    /// difference quotient is unreliable there. Covers θ then readout.
    pub kink: Vec<bool>,
}

fn relu_pattern(tape: &StepTape) -> Vec<bool> {
    tape.records()
        .iter()
        .flat_map(|r| r.a1.iter().chain(&r.a2).map(|&a| a > 0.0))
        .collect()
}

/// Central differences of `replay(net).total_loss()` over every parameter,
/// readout included.
pub fn finite_diff_with<F>(net: &ColumnarNetwork, eps: f64, replay: F) -> Result<FiniteDiff>
where
    F: Fn(&ColumnarNetwork) -> Result<StepTape>,
{
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {eps}")));
    }
    let l = net.layout();
    let base = relu_pattern(&replay(net)?);
    let mut work = net.clone();
    let total = l.total_len();
    let mut values = vec![0.0; total];
    let mut kink = vec![false; total];
    for p in 0..total {
        let orig = work.params()[p];
        work.params_mut()[p] = orig + eps;
        let plus = replay(&work)?;
        work.params_mut()[p] = orig - eps;
        let minus = replay(&work)?;
        work.params_mut()[p] = orig;
        values[p] = (plus.total_loss() - minus.total_loss()) / (2.0 * eps);
        kink[p] = relu_pattern(&plus) != base || relu_pattern(&minus) != base;
    }
    let readout = values.split_off(l.theta_len());
    Ok(FiniteDiff {
        grad: GradEstimate {
            theta: values,
            readout: Some(readout),
        },
        kink,
    })
}

/// [`finite_diff_with`] replaying `seq` with the readout frozen.
pub fn finite_diff(net: &ColumnarNetwork, seq: &crate::network::Sequence, eps: f64) -> Result<FiniteDiff> {
    finite_diff_with(net, eps, |n| n.run(seq))
}
