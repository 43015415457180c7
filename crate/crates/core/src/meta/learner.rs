use super::{lms_step, LmsConfig};
use crate::credit::{local_grads_single_pass, master_user_update, GradEstimate, MasterUserTrace};
use crate::error::{check_len, Result};
use crate::network::{ColumnarNetwork, Layout, Sequence, StepRecord, StepTape};
use crate::numkit::opcount;

/// Per-column `TW_i ≈ ∂w_i(t)/∂θ_i`, flat in θ order. Starts at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaTrace {
    values: Vec<f64>,
    group_len: usize,
}

impl MetaTrace {
    pub fn new(layout: &Layout) -> Self {
        Self {
            values: vec![0.0; layout.theta_len()],
            group_len: layout.group_len(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn group(&self, i: usize) -> &[f64] {
        &self.values[i * self.group_len..(i + 1) * self.group_len]
    }

    fn columns(&self) -> usize {
        self.values.len() / self.group_len
    }
}

/// `∂δ(t)/∂θ_i ≈ −w_i·T_i − h_i·TW_i`, per group.
pub fn delta_grad(trace: &MasterUserTrace, meta: &MetaTrace, w: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    check_len("readout weights", meta.columns(), w.len())?;
    check_len("state", meta.columns(), h.len())?;
    check_len("trace", meta.values.len(), trace.values().len())?;
    let n = meta.group_len;
    let mut out = vec![0.0; meta.values.len()];
    for i in 0..w.len() {
        let span = i * n..(i + 1) * n;
        for ((o, &t), &tw) in out[span.clone()].iter_mut().zip(trace.group(i)).zip(&meta.values[span]) {
            *o = -w[i] * t - h[i] * tw;
        }
    }
    opcount::add(3 * out.len());
    Ok(out)
}

/// `TW_i ← TW_i + α_i·δ·T_i + α_i·h_i·delta_grad_i`
pub fn meta_trace_update(
    meta: &mut MetaTrace,
    cfg: &LmsConfig,
    delta: f64,
    h: &[f64],
    trace: &MasterUserTrace,
    dg: &[f64],
) -> Result<()> {
    check_len("step sizes", meta.columns(), cfg.columns())?;
    check_len("state", meta.columns(), h.len())?;
    check_len("delta gradient", meta.values.len(), dg.len())?;
    let n = meta.group_len;
    for i in 0..h.len() {
        let a = cfg.step_sizes[i];
        let span = i * n..(i + 1) * n;
        for ((tw, &t), &g) in meta.values[span.clone()].iter_mut().zip(trace.group(i)).zip(&dg[span]) {
            *tw += a * delta * t + a * h[i] * g;
        }
    }
    opcount::add(4 * meta.values.len());
    Ok(())
}

/// Group `i`: `−δ·(w_i·T_i + h_i·TW_i)`, or `−δ·w_i·T_i` with `ablate_meta`.
pub fn meta_credit(
    trace: &MasterUserTrace,
    meta: &MetaTrace,
    delta: f64,
    w: &[f64],
    h: &[f64],
    ablate_meta: bool,
) -> Result<GradEstimate> {
    check_len("readout weights", meta.columns(), w.len())?;
    check_len("state", meta.columns(), h.len())?;
    let n = meta.group_len;
    let mut theta = vec![0.0; meta.values.len()];
    for i in 0..w.len() {
        let span = i * n..(i + 1) * n;
        let (sw, sh) = (-delta * w[i], -delta * h[i]);
        let out = &mut theta[span.clone()];
        if ablate_meta {
            for (o, &t) in out.iter_mut().zip(trace.group(i)) {
                *o = sw * t;
            }
        } else {
            for ((o, &t), &tw) in out.iter_mut().zip(trace.group(i)).zip(&meta.values[span]) {
                *o = sw * t + sh * tw;
            }
        }
    }
    opcount::add(4 * theta.len());
    Ok(GradEstimate { theta, readout: None })
}

/// Online Master-User learner with an LMS readout. Credit is estimated but
/// never applied to θ, so full and ablated estimates come from one
/// trajectory.
#[derive(Debug, Clone)]
pub struct MetaLearner {
    pub lms: LmsConfig,
    pub trace: MasterUserTrace,
    pub meta: MetaTrace,
    pub w: Vec<f64>,
    pub h: Vec<f64>,
    pub full: GradEstimate,
    pub ablated: GradEstimate,
}

impl MetaLearner {
    pub fn new(net: &ColumnarNetwork, lms: LmsConfig) -> Result<Self> {
        let l = net.layout();
        check_len("step sizes", l.columns, lms.columns())?;
        Ok(Self {
            lms,
            trace: MasterUserTrace::new(l),
            meta: MetaTrace::new(l),
            w: net.readout().to_vec(),
            h: vec![0.0; l.columns],
            full: GradEstimate::zeros(l.theta_len()),
            ablated: GradEstimate::zeros(l.theta_len()),
        })
    }

    /// One step: forward, δ, trace, credit, TW update, then LMS.
    pub fn step(&mut self, net: &ColumnarNetwork, x: &[f64], target: f64) -> Result<StepRecord> {
        let mut rec = net.step_with_readout(x, &self.h, &self.w)?;
        rec.set_target(target);
        let lg = local_grads_single_pass(net, &rec)?;
        master_user_update(&mut self.trace, &lg);
        let dg = delta_grad(&self.trace, &self.meta, &rec.w, &rec.h)?;
        let full = meta_credit(&self.trace, &self.meta, rec.delta, &rec.w, &rec.h, false)?;
        let ablated = meta_credit(&self.trace, &self.meta, rec.delta, &rec.w, &rec.h, true)?;
        self.full.add(&full);
        self.ablated.add(&ablated);
        meta_trace_update(&mut self.meta, &self.lms, rec.delta, &rec.h, &self.trace, &dg)?;
        self.w = lms_step(&rec.w, &self.lms, rec.delta, &rec.h)?;
        self.h = rec.h.clone();
        Ok(rec)
    }
}

/// Accumulated meta credit of a whole sequence, with the tape it produced.
#[derive(Debug, Clone)]
pub struct MetaRun {
    pub full: GradEstimate,
    pub ablated: GradEstimate,
    pub tape: StepTape,
}

pub fn meta_accumulate(net: &ColumnarNetwork, seq: &Sequence, lms: &LmsConfig) -> Result<MetaRun> {
    let mut learner = MetaLearner::new(net, lms.clone())?;
    let mut tape = StepTape::new();
    for (x, &y) in seq.inputs.iter().zip(&seq.targets) {
        tape.push(learner.step(net, x, y)?);
    }
    Ok(MetaRun {
        full: learner.full,
        ablated: learner.ablated,
        tape,
    })
}
