use crate::error::{check_len, Result};
use crate::numkit::{dot, gemv, gemv_t_acc, opcount, outer_acc};

/// Feature extractor of one column: `f = ReLU(W2·ReLU(W1·[x; h] + b1) + b2)`.
#[derive(Debug, Clone, Copy)]
pub struct ColumnParams<'a> {
    pub width: usize,
    pub input_dim: usize,
    pub w1: &'a [f64],
    pub b1: &'a [f64],
    pub w2: &'a [f64],
    pub b2: &'a [f64],
}

/// Pre-activations of both layers.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnCache {
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
}

impl<'a> ColumnParams<'a> {
    /// View over a contiguous `[W1, b1, W2, b2]` block.
    pub fn from_block(width: usize, input_dim: usize, block: &'a [f64]) -> Result<Self> {
        let n1 = width * (input_dim + 1);
        check_len("column parameter block", n1 + 2 * width + width * width, block.len())?;
        let (w1, rest) = block.split_at(n1);
        let (b1, rest) = rest.split_at(width);
        let (w2, b2) = rest.split_at(width * width);
        Ok(Self {
            width,
            input_dim,
            w1,
            b1,
            w2,
            b2,
        })
    }

    fn block_len(&self) -> usize {
        self.width * (self.input_dim + 1) + 2 * self.width + self.width * self.width
    }
}

#[inline]
pub(crate) fn relu(a: f64) -> f64 {
    if a > 0.0 {
        a
    } else {
        0.0
    }
}

/// Subgradient convention: derivative at exactly 0 is 0.
#[inline]
pub(crate) fn relu_grad(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else {
        0.0
    }
}

fn with_slot(x: &[f64], h: f64) -> Vec<f64> {
    let mut z = Vec::with_capacity(x.len() + 1);
    z.extend_from_slice(x);
    z.push(h);
    z
}

pub fn column_forward(p: &ColumnParams, x: &[f64], h_prev: f64) -> Result<(Vec<f64>, ColumnCache)> {
    check_len("column input", p.input_dim, x.len())?;
    let w = p.width;
    let (mut a1, mut a2, mut f) = (vec![0.0; w], vec![0.0; w], vec![0.0; w]);
    column_forward_into(p, x, h_prev, &mut a1, &mut a2, &mut f);
    Ok((f, ColumnCache { a1, a2 }))
}

pub(crate) fn column_forward_into(
    p: &ColumnParams,
    x: &[f64],
    h_slot: f64,
    a1: &mut [f64],
    a2: &mut [f64],
    f: &mut [f64],
) {
    let w = p.width;
    let z = with_slot(x, h_slot);
    gemv(w, p.input_dim + 1, p.w1, &z, a1);
    for (a, b) in a1.iter_mut().zip(p.b1) {
        *a += b;
    }
    let r1: Vec<f64> = a1.iter().map(|&a| relu(a)).collect();
    gemv(w, w, p.w2, &r1, a2);
    for ((fk, a), b) in f.iter_mut().zip(a2.iter_mut()).zip(p.b2) {
        *a += b;
        *fk = relu(*a);
    }
    opcount::add(4 * w);
}

/// Reverse pass through one column. Accumulates parameter gradients into
/// `grad` (laid out like the `[W1, b1, W2, b2]` block) when given, and
/// returns the adjoint of the previous-state input slot.
#[allow(clippy::too_many_arguments)]
pub(crate) fn column_backward(
    p: &ColumnParams,
    x: &[f64],
    h_slot: f64,
    a1: &[f64],
    a2: &[f64],
    adj_f: &[f64],
    grad: Option<&mut [f64]>,
) -> f64 {
    let w = p.width;
    let d1 = p.input_dim + 1;
    let ga2: Vec<f64> = adj_f.iter().zip(a2).map(|(g, &a)| g * relu_grad(a)).collect();
    let mut adj_r1 = vec![0.0; w];
    gemv_t_acc(w, w, p.w2, &ga2, &mut adj_r1);
    let ga1: Vec<f64> = adj_r1.iter().zip(a1).map(|(g, &a)| g * relu_grad(a)).collect();
    opcount::add(2 * w);
    if let Some(grad) = grad {
        debug_assert_eq!(grad.len(), p.block_len());
        let (gw1, rest) = grad.split_at_mut(w * d1);
        let (gb1, rest) = rest.split_at_mut(w);
        let (gw2, gb2) = rest.split_at_mut(w * w);
        let r1: Vec<f64> = a1.iter().map(|&a| relu(a)).collect();
        outer_acc(&ga2, &r1, gw2);
        for (b, g) in gb2.iter_mut().zip(&ga2) {
            *b += g;
        }
        let z = with_slot(x, h_slot);
        outer_acc(&ga1, &z, gw1);
        for (b, g) in gb1.iter_mut().zip(&ga1) {
            *b += g;
        }
        opcount::add(3 * w);
    }
    // adjoint of the last input slot: column `input_dim` of W1
    let slot_col: Vec<f64> = (0..w).map(|k| p.w1[k * d1 + p.input_dim]).collect();
    dot(&slot_col, &ga1)
}

/// Forward tangent `∂f/∂h_slot`.
pub(crate) fn column_slot_tangent(p: &ColumnParams, a1: &[f64], a2: &[f64]) -> Vec<f64> {
    let w = p.width;
    let d1 = p.input_dim + 1;
    let dr1: Vec<f64> = (0..w).map(|k| p.w1[k * d1 + p.input_dim] * relu_grad(a1[k])).collect();
    let mut da2 = vec![0.0; w];
    gemv(w, w, p.w2, &dr1, &mut da2);
    opcount::add(2 * w);
    da2.iter().zip(a2).map(|(d, &a)| d * relu_grad(a)).collect()
}
