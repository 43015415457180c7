use super::{check_alphas, check_tape, GradEstimate};
use crate::error::{Error, Result};
use crate::network::{state_jacobian, step_vjp, ColumnarNetwork, StepRecord, StepTape};
use crate::numkit::opcount;

/// Exact gradient of `Σ_t ½δ(t)²` w.r.t. θ and the readout, readout frozen.
pub fn bptt_full(net: &ColumnarNetwork, tape: &StepTape) -> Result<GradEstimate> {
    reverse_accumulate(net, tape, None)
}

/// Truncated BPTT: the loss at `t` is differentiated only through steps
/// `t−k+1..=t`. `k ≥ T` gives the untruncated gradient.
pub fn tbptt(net: &ColumnarNetwork, tape: &StepTape, k: usize) -> Result<GradEstimate> {
    truncated_accumulate(net, tape, None, k)
}

// Adjoint step through `w(τ+1) = w(τ) + α⊙δ(τ)·h(τ)`, `δ(τ) = y*(τ) − w(τ)·h(τ)`.
// Adds the adjoint of h(τ) into `gh` and turns `gw` (adjoint of w(τ+1))
// into the adjoint of w(τ).
fn lms_adjoint(rec: &StepRecord, alphas: &[f64], gw: &mut [f64], gh: &mut [f64]) {
    let mut dbar = 0.0;
    for ((&a, &h), &g) in alphas.iter().zip(&rec.h).zip(gw.iter()) {
        dbar += a * h * g;
    }
    for i in 0..gw.len() {
        gh[i] += alphas[i] * rec.delta * gw[i] - dbar * rec.w[i];
        gw[i] -= dbar * rec.h[i];
    }
    opcount::add(7 * gw.len());
}

/// Full reverse pass over the tape. With `alphas`, the readout is taken to
/// follow per-column LMS steps between records (each record holds the `w`
/// it used), and the gradient flows through those updates too. The
/// returned readout gradient is w.r.t. the first step's readout.
pub fn reverse_accumulate(net: &ColumnarNetwork, tape: &StepTape, alphas: Option<&[f64]>) -> Result<GradEstimate> {
    check_tape(net, tape)?;
    check_alphas(net, alphas)?;
    let l = net.layout();
    let c = l.columns;
    let mut grad = vec![0.0; l.theta_len()];
    let mut gh_next = vec![0.0; c];
    let mut gw = vec![0.0; c];
    for rec in tape.records().iter().rev() {
        let mut gh = gh_next;
        if let Some(a) = alphas {
            lms_adjoint(rec, a, &mut gw, &mut gh);
        }
        for i in 0..c {
            gh[i] -= rec.delta * rec.w[i];
            gw[i] -= rec.delta * rec.h[i];
        }
        gh_next = step_vjp(net, rec, &gh, false, Some(&mut grad));
    }
    Ok(GradEstimate {
        theta: grad,
        readout: Some(gw),
    })
}

/// Truncated counterpart of [`reverse_accumulate`]. Each loss sends its
/// adjoint back at most `k − 1` steps through the state Jacobians (and the
/// LMS updates, when `alphas` is given). Adjoints landing on the same step
/// are summed before the single parameter pass per step, so the cost is
/// `O(T·|θ| + T·k·C²)`.
///
/// The readout gradient is only reported without `alphas`.
pub fn truncated_accumulate(net: &ColumnarNetwork, tape: &StepTape, alphas: Option<&[f64]>, k: usize) -> Result<GradEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("truncation window must be at least 1".into()));
    }
    check_tape(net, tape)?;
    check_alphas(net, alphas)?;
    let l = net.layout();
    let c = l.columns;
    let recs = tape.records();
    let n = recs.len();
    let jacs: Vec<_> = if k > 1 {
        recs.iter().map(|r| state_jacobian(net, r)).collect()
    } else {
        Vec::new()
    };
    let mut adj = vec![vec![0.0; c]; n];
    let mut readout = vec![0.0; c];
    for t in 0..n {
        let rec = &recs[t];
        let mut gh: Vec<f64> = rec.w.iter().map(|&w| -rec.delta * w).collect();
        let mut gw: Vec<f64> = rec.h.iter().map(|&h| -rec.delta * h).collect();
        for (r, g) in readout.iter_mut().zip(&gw) {
            *r += g;
        }
        for (a, g) in adj[t].iter_mut().zip(&gh) {
            *a += g;
        }
        let lo = (t + 1).saturating_sub(k);
        for tau in (lo..t).rev() {
            let jac = &jacs[tau + 1];
            let mut next = vec![0.0; c];
            for (i, &g) in gh.iter().enumerate() {
                if g != 0.0 {
                    for (o, &j) in next.iter_mut().zip(jac.row(i)) {
                        *o += g * j;
                    }
                }
            }
            opcount::add(2 * c * c);
            if let Some(a) = alphas {
                lms_adjoint(&recs[tau], a, &mut gw, &mut next);
            }
            for (acc, g) in adj[tau].iter_mut().zip(&next) {
                *acc += g;
            }
            gh = next;
        }
    }
    let mut grad = vec![0.0; l.theta_len()];
    for (rec, a) in recs.iter().zip(&adj) {
        step_vjp(net, rec, a, false, Some(&mut grad));
    }
    Ok(GradEstimate {
        theta: grad,
        readout: if alphas.is_none() { Some(readout) } else { None },
    })
}
