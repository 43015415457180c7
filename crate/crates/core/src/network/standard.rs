//! Textbook LSTM and GRU cells, used to measure how fast an untrained cell
//! forgets its initial state.

use serde::{Deserialize, Serialize};

use super::cell::sigmoid;
use crate::error::{check_len, Result};
use crate::numkit::{gemv, uniform_sqrtk_init, DenseMatrix, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StandardKind {
    Lstm,
    Gru,
}

impl StandardKind {
    pub fn name(self) -> &'static str {
        match self {
            StandardKind::Lstm => "lstm",
            StandardKind::Gru => "gru",
        }
    }

    fn gates(self) -> usize {
        match self {
            StandardKind::Lstm => 4,
            StandardKind::Gru => 3,
        }
    }
}

/// Stacked gate weights. LSTM rows are ordered (input, forget, cell,
/// output); GRU rows are ordered (reset, update, candidate).
#[derive(Debug, Clone)]
pub struct StandardCell {
    pub kind: StandardKind,
    pub hidden: usize,
    pub input: usize,
    pub w_ih: DenseMatrix,
    pub w_hh: DenseMatrix,
    pub b_ih: Option<Vec<f64>>,
    pub b_hh: Option<Vec<f64>>,
}

impl StandardCell {
    /// All weights and biases uniform in (−√k, √k), k = 1/hidden.
    pub fn init(kind: StandardKind, hidden: usize, input: usize, with_bias: bool, rng: &mut RngStream) -> Result<Self> {
        let rows = kind.gates() * hidden;
        let w_ih = uniform_sqrtk_init(rows, input, hidden, rng)?;
        let w_hh = uniform_sqrtk_init(rows, hidden, hidden, rng)?;
        let (b_ih, b_hh) = if with_bias {
            (
                Some(uniform_sqrtk_init(rows, 1, hidden, rng)?.into_vec()),
                Some(uniform_sqrtk_init(rows, 1, hidden, rng)?.into_vec()),
            )
        } else {
            (None, None)
        };
        Ok(Self {
            kind,
            hidden,
            input,
            w_ih,
            w_hh,
            b_ih,
            b_hh,
        })
    }

    /// All-zero weights and no bias.
    pub fn zeros(kind: StandardKind, hidden: usize, input: usize) -> Result<Self> {
        let rows = kind.gates() * hidden;
        Ok(Self {
            kind,
            hidden,
            input,
            w_ih: DenseMatrix::zeros(rows, input)?,
            w_hh: DenseMatrix::zeros(rows, hidden)?,
            b_ih: None,
            b_hh: None,
        })
    }

    fn affine(&self, x: &[f64], h: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let rows = self.kind.gates() * self.hidden;
        let mut gi = vec![0.0; rows];
        let mut gh = vec![0.0; rows];
        gemv(rows, self.input, self.w_ih.as_slice(), x, &mut gi);
        gemv(rows, self.hidden, self.w_hh.as_slice(), h, &mut gh);
        if let Some(b) = &self.b_ih {
            gi.iter_mut().zip(b).for_each(|(g, b)| *g += b);
        }
        if let Some(b) = &self.b_hh {
            gh.iter_mut().zip(b).for_each(|(g, b)| *g += b);
        }
        (gi, gh)
    }

    /// One transition. Returns `(h, c)`; for the GRU the cell state is
    /// passed through untouched.
    pub fn step(&self, h: &[f64], c: &[f64], x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.hidden;
        check_len("hidden state", n, h.len())?;
        check_len("input", self.input, x.len())?;
        let (gi, gh) = self.affine(x, h);
        match self.kind {
            StandardKind::Lstm => {
                check_len("cell state", n, c.len())?;
                let mut h_new = vec![0.0; n];
                let mut c_new = vec![0.0; n];
                for k in 0..n {
                    let pre = |g: usize| gi[g * n + k] + gh[g * n + k];
                    let (i, f, g, o) = (sigmoid(pre(0)), sigmoid(pre(1)), pre(2).tanh(), sigmoid(pre(3)));
                    c_new[k] = f * c[k] + i * g;
                    h_new[k] = o * c_new[k].tanh();
                }
                Ok((h_new, c_new))
            }
            StandardKind::Gru => {
                let mut h_new = vec![0.0; n];
                for k in 0..n {
                    let r = sigmoid(gi[k] + gh[k]);
                    let z = sigmoid(gi[n + k] + gh[n + k]);
                    let cand = (gi[2 * n + k] + r * gh[2 * n + k]).tanh();
                    h_new[k] = (1.0 - z) * h[k] + z * cand;
                }
                Ok((h_new, c.to_vec()))
            }
        }
    }
}

pub fn standard_cell_step(cell: &StandardCell, h: &[f64], c: &[f64], x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    cell.step(h, c, x)
}
