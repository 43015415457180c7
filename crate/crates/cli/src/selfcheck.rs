//! Oracle-equivalence checks on small networks, run by `colnet selfcheck`.

use colnet::bench::{gen_sequence, SequenceSpec};
use colnet::credit::{
    bptt_full, finite_diff, local_grads_per_state, local_grads_single_pass, master_user_credit, master_user_update,
    rel_inf_deviation, rtrl_accumulate, tbptt, GradEstimate, LocalGrads, MasterUserTrace,
};
use colnet::meta::{bptt_through_learning, finite_diff_through_learning, LmsConfig};
use colnet::network::{build_network, CellKind, ColumnarNetwork, NetConfig, Sequence};
use colnet::numkit::RngStream;
use colnet::Result;
use serde::{Deserialize, Serialize};

/// Trace recursion under test.
pub type TraceUpdate = fn(&mut MasterUserTrace, &LocalGrads);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub property: String,
    /// `"pass"` or `"fail"`.
    pub status: String,
    /// Largest deviation from the reference, relative to the reference's
    /// largest magnitude.
    pub max_abs_dev: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn new(property: &str, dev: Result<f64>, tolerance: f64) -> Self {
        let max_abs_dev = dev.unwrap_or(f64::INFINITY);
        let ok = max_abs_dev <= tolerance;
        Self {
            property: property.into(),
            status: if ok { "pass" } else { "fail" }.into(),
            max_abs_dev,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

const CELLS: [CellKind; 3] = [CellKind::AdditiveTanh, CellKind::Static, CellKind::GruColumn];
const COLUMNS: usize = 3;
const WIDTH: usize = 5;
const INPUT: usize = 4;
const LENGTH: usize = 20;

fn instance(cell: CellKind, s: f64, seed: u64) -> Result<(ColumnarNetwork, Sequence)> {
    let root = RngStream::new(seed);
    let net = build_network(&NetConfig::new(COLUMNS, WIDTH, INPUT, cell, s), &root.fork(0))?;
    let spec = SequenceSpec { length: LENGTH, input_dim: INPUT };
    let seq = gen_sequence(&spec, &mut root.fork(2))?;
    Ok((net, seq))
}

fn worst(devs: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    devs.into_iter().try_fold(0.0f64, |m, d| Ok(m.max(d?)))
}

fn flat(g: &GradEstimate) -> Vec<f64> {
    g.theta.iter().chain(g.readout.iter().flatten()).copied().collect()
}

/// Largest deviation over components without a ReLU kink, relative to the
/// exact gradient's largest magnitude.
fn fd_dev(exact: &GradEstimate, approx: &GradEstimate, kink: &[bool]) -> f64 {
    let (e, a) = (flat(exact), flat(approx));
    let scale = e.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    e.iter()
        .zip(&a)
        .zip(kink)
        .filter(|(_, &k)| !k)
        .fold(0.0f64, |m, ((x, y), _)| m.max((x - y).abs() / scale))
}

fn single_pass_dev(cell: CellKind) -> Result<f64> {
    let (net, seq) = instance(cell, 100.0, 1)?;
    let tape = net.run(&seq)?;
    worst(tape.records().iter().map(|rec| {
        let a = local_grads_single_pass(&net, rec)?;
        let b = local_grads_per_state(&net, rec)?;
        Ok(a.d_theta
            .iter()
            .chain(&a.d_hprev)
            .zip(b.d_theta.iter().chain(&b.d_hprev))
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
    }))
}

fn s0_dev(cell: CellKind, update: TraceUpdate) -> Result<f64> {
    let (net, seq) = instance(cell, 0.0, 2)?;
    let tape = net.run(&seq)?;
    let mut trace = MasterUserTrace::new(net.layout());
    let mut sum = vec![0.0; net.layout().theta_len()];
    for rec in tape.records() {
        update(&mut trace, &local_grads_single_pass(&net, rec)?);
        let credit = master_user_credit(&trace, rec.delta, &rec.w, None)?;
        for (s, c) in sum.iter_mut().zip(&credit.theta) {
            *s += c;
        }
    }
    rel_inf_deviation(&sum, &bptt_full(&net, &tape)?.theta)
}

fn rtrl_dev(cell: CellKind) -> Result<f64> {
    let (net, seq) = instance(cell, 100.0, 3)?;
    let tape = net.run(&seq)?;
    rel_inf_deviation(&rtrl_accumulate(&net, &tape)?.theta, &bptt_full(&net, &tape)?.theta)
}

fn fd_frozen_dev(cell: CellKind) -> Result<f64> {
    let (net, seq) = instance(cell, 100.0, 4)?;
    let seq = seq.truncated(8);
    let exact = bptt_full(&net, &net.run(&seq)?)?;
    let fd = finite_diff(&net, &seq, 1e-5)?;
    Ok(fd_dev(&exact, &fd.grad, &fd.kink))
}

fn tbptt_dev(cell: CellKind) -> Result<f64> {
    let (net, seq) = instance(cell, 100.0, 5)?;
    let tape = net.run(&seq)?;
    rel_inf_deviation(&tbptt(&net, &tape, LENGTH)?.theta, &bptt_full(&net, &tape)?.theta)
}

fn fd_learning_dev(cell: CellKind) -> Result<f64> {
    let (net, seq) = instance(cell, 100.0, 6)?;
    let seq = seq.truncated(8);
    let lms = LmsConfig::uniform(COLUMNS, 1e-3)?;
    let exact = bptt_through_learning(&net, &seq, &lms)?;
    let fd = finite_diff_through_learning(&net, &seq, &lms, 1e-5)?;
    Ok(fd_dev(&exact, &fd.grad, &fd.kink))
}

/// Runs every check with the library's trace recursion.
pub fn selfcheck() -> Vec<CheckResult> {
    selfcheck_with(master_user_update)
}

/// Runs every check, using `update` wherever the Master-User trace is
/// advanced.
pub fn selfcheck_with(update: TraceUpdate) -> Vec<CheckResult> {
    let over = |f: &dyn Fn(CellKind) -> Result<f64>| worst(CELLS.map(f));
    vec![
        CheckResult::new("single_pass_equivalence", over(&single_pass_dev), 0.0),
        CheckResult::new("s0_exactness", over(&|c| s0_dev(c, update)), 1e-10),
        CheckResult::new("rtrl_matches_bptt", over(&rtrl_dev), 1e-8),
        CheckResult::new("bptt_matches_finite_diff", over(&fd_frozen_dev), 1e-4),
        CheckResult::new("tbptt_full_window", over(&tbptt_dev), 1e-12),
        CheckResult::new("learning_bptt_matches_finite_diff", over(&fd_learning_dev), 1e-4),
    ]
}
