use super::{check_record, local_grads_single_pass, GradEstimate, LocalGrads};
use crate::error::{check_len, Result};
use crate::network::{ColumnarNetwork, Layout, StepRecord, StepTape};
use crate::numkit::opcount;

/// Running per-column approximation `T_i ≈ ∂h_i(t)/∂θ_i`, stored flat in
/// θ order. Starts at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterUserTrace {
    values: Vec<f64>,
    group_len: usize,
    steps: usize,
}

impl MasterUserTrace {
    pub fn new(layout: &Layout) -> Self {
        Self {
            values: vec![0.0; layout.theta_len()],
            group_len: layout.group_len(),
            steps: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn group(&self, i: usize) -> &[f64] {
        &self.values[i * self.group_len..(i + 1) * self.group_len]
    }

    pub fn columns(&self) -> usize {
        self.values.len() / self.group_len
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// `T_i ← ∂h_i(t)/∂θ_i(t) + ∂h_i(t)/∂h_i(t−1) · T_i`, per column. Influence
/// of `θ_i` on `h_i` routed through other columns' states is dropped.
pub fn master_user_update(trace: &mut MasterUserTrace, lg: &LocalGrads) {
    debug_assert_eq!(trace.values.len(), lg.d_theta.len());
    let n = trace.group_len;
    for (i, &decay) in lg.d_hprev.iter().enumerate() {
        let span = i * n..(i + 1) * n;
        for (t, &g) in trace.values[span.clone()].iter_mut().zip(&lg.d_theta[span]) {
            *t = g + decay * *t;
        }
    }
    opcount::add(2 * trace.values.len());
    trace.steps += 1;
}

/// Group `i` block: `−δ·w_i·T_i`. With `h` given, also the readout
/// gradient `−δ·h`.
pub fn master_user_credit(trace: &MasterUserTrace, delta: f64, w: &[f64], h: Option<&[f64]>) -> Result<GradEstimate> {
    check_len("readout weights", trace.columns(), w.len())?;
    let n = trace.group_len;
    let mut theta = vec![0.0; trace.values.len()];
    for (i, &wi) in w.iter().enumerate() {
        let scale = -delta * wi;
        for (o, &t) in theta[i * n..(i + 1) * n].iter_mut().zip(trace.group(i)) {
            *o = scale * t;
        }
    }
    opcount::add(theta.len());
    let readout = match h {
        Some(h) => {
            check_len("state", w.len(), h.len())?;
            Some(h.iter().map(|&v| -delta * v).collect())
        }
        None => None,
    };
    Ok(GradEstimate { theta, readout })
}

/// Online estimator: keeps the trace and the running sum of per-step
/// credit.
#[derive(Debug, Clone)]
pub struct MasterUser {
    pub trace: MasterUserTrace,
    pub accumulated: GradEstimate,
}

impl MasterUser {
    pub fn new(layout: &Layout) -> Self {
        Self {
            trace: MasterUserTrace::new(layout),
            accumulated: GradEstimate::zeros(layout.theta_len()),
        }
    }

    /// Consumes step `t`: local gradients, trace update, credit.
    pub fn observe(&mut self, net: &ColumnarNetwork, rec: &StepRecord) -> Result<GradEstimate> {
        check_record(net, rec)?;
        let lg = local_grads_single_pass(net, rec)?;
        master_user_update(&mut self.trace, &lg);
        let credit = master_user_credit(&self.trace, rec.delta, &rec.w, Some(&rec.h))?;
        self.accumulated.add(&credit);
        Ok(credit)
    }
}

/// Sum over the tape of the per-step Master-User credit.
pub fn master_user_accumulate(net: &ColumnarNetwork, tape: &StepTape) -> Result<GradEstimate> {
    let mut mu = MasterUser::new(net.layout());
    for rec in tape.records() {
        mu.observe(net, rec)?;
    }
    Ok(mu.accumulated)
}
