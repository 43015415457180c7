use super::{CellKind, LateralMask, Layout};
use crate::error::{check_len, Error, Result};
use crate::numkit::opcount;

/// Parameter block of the recurrence cell. The additive and static cells
/// only use `Candidate`; the GRU cell has separate blocks per gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Candidate = 0,
    Update = 1,
    Reset = 2,
}

/// Row-wise view of the stacked cell matrices `U` (C x C·W) and `R` (C x C)
/// inside the flat parameter buffer.
#[derive(Debug, Clone, Copy)]
pub struct CellParams<'a> {
    layout: &'a Layout,
    theta: &'a [f64],
}

impl<'a> CellParams<'a> {
    pub fn new(layout: &'a Layout, theta: &'a [f64]) -> Result<Self> {
        if theta.len() < layout.theta_len() {
            return Err(Error::Shape {
                what: "cell parameters",
                expected: layout.theta_len(),
                got: theta.len(),
            });
        }
        Ok(Self { layout, theta })
    }

    pub fn layout(&self) -> &Layout {
        self.layout
    }

    pub fn u_row(&self, gate: Gate, row: usize) -> &'a [f64] {
        let base = self.layout.group_range(row).start;
        let r = self.layout.u_row(gate);
        &self.theta[base + r.start..base + r.end]
    }

    pub fn r_row(&self, gate: Gate, row: usize) -> &'a [f64] {
        let base = self.layout.group_range(row).start;
        let r = self.layout.r_row(gate);
        &self.theta[base + r.start..base + r.end]
    }
}

/// Pre-activations cached by the cell forward pass.
#[derive(Debug, Clone, PartialEq)]
pub enum CellCache {
    Additive { pre: Vec<f64> },
    Static { pre: Vec<f64> },
    /// `q` is the reset-gated recurrent term before gating, `R_n·h_prev`.
    Gru {
        az: Vec<f64>,
        ar: Vec<f64>,
        q: Vec<f64>,
        an: Vec<f64>,
    },
}

/// Dot product over the active entries only, ascending index order.
/// Masked entries are never read, whatever value they hold.
#[inline]
pub(crate) fn masked_dot(row: &[f64], active: &[usize], x: &[f64]) -> f64 {
    opcount::add(2 * active.len());
    let mut acc = 0.0;
    for &k in active {
        acc += row[k] * x[k];
    }
    acc
}

#[inline]
pub(crate) fn sigmoid(a: f64) -> f64 {
    1.0 / (1.0 + (-a).exp())
}

fn check_shapes(cell: &CellParams, mask: &LateralMask, f_all: &[f64], h_prev: Option<&[f64]>) -> Result<()> {
    let l = cell.layout();
    check_len("feature vector", l.columns * l.width, f_all.len())?;
    check_len("mask columns", l.columns, mask.columns())?;
    check_len("mask width", l.width, mask.width())?;
    if let Some(h) = h_prev {
        check_len("previous state", l.columns, h.len())?;
    }
    Ok(())
}

/// `h_i = h_prev_i + tanh(row_i(U)·f + row_i(R)·h_prev)`, masked.
pub fn cell_forward_additive(
    cell: &CellParams,
    mask: &LateralMask,
    f_all: &[f64],
    h_prev: &[f64],
) -> Result<(Vec<f64>, CellCache)> {
    check_shapes(cell, mask, f_all, Some(h_prev))?;
    let c = cell.layout().columns;
    let mut pre = vec![0.0; c];
    let mut h = vec![0.0; c];
    for i in 0..c {
        pre[i] = masked_dot(cell.u_row(Gate::Candidate, i), mask.u_active(i), f_all)
            + masked_dot(cell.r_row(Gate::Candidate, i), mask.r_active(i), h_prev);
        h[i] = h_prev[i] + pre[i].tanh();
    }
    opcount::add(3 * c);
    Ok((h, CellCache::Additive { pre }))
}

/// `h_i = tanh(row_i(U)·f)`, masked; no dependence on the previous state.
pub fn cell_forward_static(cell: &CellParams, mask: &LateralMask, f_all: &[f64]) -> Result<(Vec<f64>, CellCache)> {
    check_shapes(cell, mask, f_all, None)?;
    let c = cell.layout().columns;
    let mut pre = vec![0.0; c];
    let mut h = vec![0.0; c];
    for i in 0..c {
        pre[i] = masked_dot(cell.u_row(Gate::Candidate, i), mask.u_active(i), f_all);
        h[i] = pre[i].tanh();
    }
    opcount::add(2 * c);
    Ok((h, CellCache::Static { pre }))
}

/// Scalar GRU per column:
/// `z = σ(U_z·f + R_z·h)`, `r = σ(U_r·f + R_r·h)`,
/// `n = tanh(U_n·f + r·(R_n·h))`, `h_i = (1 − z)·h_prev_i + z·n`.
pub fn cell_forward_gru(
    cell: &CellParams,
    mask: &LateralMask,
    f_all: &[f64],
    h_prev: &[f64],
) -> Result<(Vec<f64>, CellCache)> {
    check_shapes(cell, mask, f_all, Some(h_prev))?;
    if cell.layout().cell != CellKind::GruColumn {
        return Err(Error::InvalidArgument("GRU forward on a network without gate blocks".into()));
    }
    let c = cell.layout().columns;
    let (mut az, mut ar, mut q, mut an) = (vec![0.0; c], vec![0.0; c], vec![0.0; c], vec![0.0; c]);
    let mut h = vec![0.0; c];
    for i in 0..c {
        let (ua, ra) = (mask.u_active(i), mask.r_active(i));
        az[i] = masked_dot(cell.u_row(Gate::Update, i), ua, f_all) + masked_dot(cell.r_row(Gate::Update, i), ra, h_prev);
        ar[i] = masked_dot(cell.u_row(Gate::Reset, i), ua, f_all) + masked_dot(cell.r_row(Gate::Reset, i), ra, h_prev);
        q[i] = masked_dot(cell.r_row(Gate::Candidate, i), ra, h_prev);
        an[i] = masked_dot(cell.u_row(Gate::Candidate, i), ua, f_all) + sigmoid(ar[i]) * q[i];
        let z = sigmoid(az[i]);
        h[i] = (1.0 - z) * h_prev[i] + z * an[i].tanh();
    }
    opcount::add(12 * c);
    Ok((h, CellCache::Gru { az, ar, q, an }))
}
