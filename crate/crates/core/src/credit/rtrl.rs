use super::{check_record, GradEstimate};
use crate::error::{Error, Result};
use crate::network::{state_jacobian, step_vjp, ColumnarNetwork, StepRecord, StepTape};
use crate::numkit::{axpy, opcount};

/// Largest θ for which the `C x |θ|` sensitivity matrix is allowed.
pub const RTRL_MAX_PARAMS: usize = 200_000;

/// Forward-mode sensitivity `J = ∂h(t)/∂θ`, row `i` for state `i`.
#[derive(Debug, Clone)]
pub struct RtrlState {
    columns: usize,
    params: usize,
    jac: Vec<f64>,
    steps: usize,
}

impl RtrlState {
    pub fn new(net: &ColumnarNetwork) -> Result<Self> {
        let l = net.layout();
        let p = l.theta_len();
        if p > RTRL_MAX_PARAMS {
            return Err(Error::InvalidArgument(format!(
                "RTRL needs a {} x {p} sensitivity matrix; limit is {RTRL_MAX_PARAMS} parameters",
                l.columns
            )));
        }
        Ok(Self {
            columns: l.columns,
            params: p,
            jac: vec![0.0; l.columns * p],
            steps: 0,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.jac[i * self.params..(i + 1) * self.params]
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// `J(t) = ∂h(t)/∂θ(t) + ∂h(t)/∂h(t−1)·J(t−1)`; returns `−δ(t)·w(t)ᵀJ(t)`.
pub fn rtrl_full(net: &ColumnarNetwork, state: &mut RtrlState, rec: &StepRecord) -> Result<GradEstimate> {
    check_record(net, rec)?;
    if state.params != net.layout().theta_len() || state.columns != net.layout().columns {
        return Err(Error::InvalidState("RTRL state belongs to a different network".into()));
    }
    let (c, p) = (state.columns, state.params);
    let jh = state_jacobian(net, rec);
    let mut next = vec![0.0; c * p];
    for i in 0..c {
        let row = &mut next[i * p..(i + 1) * p];
        let mut seed = vec![0.0; c];
        seed[i] = 1.0;
        step_vjp(net, rec, &seed, false, Some(row));
        for j in 0..c {
            let a = jh.get(i, j);
            if a != 0.0 {
                axpy(a, &state.jac[j * p..(j + 1) * p], row);
            }
        }
    }
    state.jac = next;
    state.steps += 1;
    let mut theta = vec![0.0; p];
    for i in 0..c {
        axpy(-rec.delta * rec.w[i], state.row(i), &mut theta);
    }
    opcount::add(c);
    Ok(GradEstimate { theta, readout: None })
}

/// Sum of the per-step RTRL credit over the tape.
pub fn rtrl_accumulate(net: &ColumnarNetwork, tape: &StepTape) -> Result<GradEstimate> {
    let mut state = RtrlState::new(net)?;
    let mut total = GradEstimate::zeros(net.layout().theta_len());
    for rec in tape.records() {
        total.add(&rtrl_full(net, &mut state, rec)?);
    }
    Ok(total)
}
