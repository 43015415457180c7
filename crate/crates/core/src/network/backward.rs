//! Per-step derivatives of the columnar network.
//!
//! [`step_vjp`] is the reverse pass through one step (vector-Jacobian
//! product); [`state_jacobian`] builds `∂h(t)/∂h(t−1)` by forward tangents.
//! The two are computed along independent routes and cross-checked in
//! tests.

use super::cell::{sigmoid, CellCache, Gate};
use super::column::{column_backward, column_slot_tangent};
use super::{CellKind, ColumnarNetwork, StepRecord};
use crate::numkit::{opcount, DenseMatrix};

struct RowCtx<'a> {
    net: &'a ColumnarNetwork,
    rec: &'a StepRecord,
    stop_lateral: bool,
}

impl RowCtx<'_> {
    /// Pulls the adjoints `ga_u` (of the U-row pre-activation term) and
    /// `ga_r` (of the R-row term) of row `i`, block `gate`, back to the
    /// row's weights, the features and the previous state.
    #[allow(clippy::too_many_arguments)]
    fn row(
        &self,
        i: usize,
        gate: Gate,
        ga_u: f64,
        ga_r: Option<f64>,
        adj_f: &mut [f64],
        adj_hp: &mut [f64],
        grad: &mut Option<&mut [f64]>,
    ) {
        let l = self.net.layout();
        let w = l.width;
        let mask = self.net.mask();
        let cell = self.net.cell();
        let base = l.group_range(i).start;
        let u = cell.u_row(gate, i);
        let u_off = base + l.u_row(gate).start;
        let active = mask.u_active(i);
        if let Some(g) = grad.as_deref_mut() {
            for &k in active {
                g[u_off + k] += ga_u * self.rec.f[k];
            }
        }
        if self.stop_lateral {
            for k in i * w..(i + 1) * w {
                adj_f[k] += ga_u * u[k];
            }
        } else {
            for &k in active {
                adj_f[k] += ga_u * u[k];
            }
        }
        opcount::add(4 * active.len());

        let Some(ga_r) = ga_r else { return };
        let r = cell.r_row(gate, i);
        let r_off = base + l.r_row(gate).start;
        let r_active = mask.r_active(i);
        if let Some(g) = grad.as_deref_mut() {
            for &j in r_active {
                g[r_off + j] += ga_r * self.rec.h_prev[j];
            }
        }
        for &j in r_active {
            if !self.stop_lateral || j == i {
                adj_hp[j] += ga_r * r[j];
            }
        }
        opcount::add(4 * r_active.len());
    }
}

/// Reverse pass through one step.
///
/// Given the adjoint `adj_h` of `h(t)`, accumulates `adj_hᵀ·∂h(t)/∂θ(t)`
/// into `grad` (length `theta_len`, when given) and returns the adjoint of
/// `h(t−1)`. With `stop_lateral`, gradient is blocked on every edge from a
/// state `h_i` into another column's feature `f_j` or previous state
/// `h_j(t−1)`; parameter gradients of row `i` itself are kept.
pub fn step_vjp(
    net: &ColumnarNetwork,
    rec: &StepRecord,
    adj_h: &[f64],
    stop_lateral: bool,
    mut grad: Option<&mut [f64]>,
) -> Vec<f64> {
    let l = net.layout();
    let (c, w) = (l.columns, l.width);
    debug_assert_eq!(adj_h.len(), c);
    if let Some(g) = grad.as_deref() {
        debug_assert_eq!(g.len(), l.theta_len());
    }
    let ctx = RowCtx {
        net,
        rec,
        stop_lateral,
    };
    let mut adj_f = vec![0.0; c * w];
    let mut adj_hp = vec![0.0; c];

    for (i, &g) in adj_h.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        match &rec.cell {
            CellCache::Additive { pre } => {
                adj_hp[i] += g;
                let t = pre[i].tanh();
                let ga = g * (1.0 - t * t);
                ctx.row(i, Gate::Candidate, ga, Some(ga), &mut adj_f, &mut adj_hp, &mut grad);
            }
            CellCache::Static { pre } => {
                let t = pre[i].tanh();
                let ga = g * (1.0 - t * t);
                ctx.row(i, Gate::Candidate, ga, None, &mut adj_f, &mut adj_hp, &mut grad);
            }
            CellCache::Gru { az, ar, q, an } => {
                let z = sigmoid(az[i]);
                let r = sigmoid(ar[i]);
                let n = an[i].tanh();
                adj_hp[i] += g * (1.0 - z);
                let gan = g * z * (1.0 - n * n);
                let gaz = g * (n - rec.h_prev[i]) * z * (1.0 - z);
                let gar = gan * q[i] * r * (1.0 - r);
                ctx.row(i, Gate::Candidate, gan, Some(gan * r), &mut adj_f, &mut adj_hp, &mut grad);
                ctx.row(i, Gate::Update, gaz, Some(gaz), &mut adj_f, &mut adj_hp, &mut grad);
                ctx.row(i, Gate::Reset, gar, Some(gar), &mut adj_f, &mut adj_hp, &mut grad);
            }
        }
        opcount::add(12);
    }

    let recurrent = net.config().cell.is_recurrent();
    for j in 0..c {
        let span = j * w..(j + 1) * w;
        let adj = &adj_f[span.clone()];
        if adj.iter().all(|&v| v == 0.0) {
            continue;
        }
        let slot = net.column_slot(&rec.h_prev, j);
        let col_grad = grad.as_deref_mut().map(|g| {
            let start = l.group_range(j).start;
            let ext = l.extractor();
            &mut g[start + ext.start..start + ext.end]
        });
        let adj_slot = column_backward(&net.column(j), &rec.x, slot, &rec.a1[span.clone()], &rec.a2[span], adj, col_grad);
        if recurrent {
            adj_hp[j] += adj_slot;
        }
    }
    adj_hp
}

/// `∂h(t)/∂h(t−1)` as a dense `C x C` matrix, by forward tangents through
/// every column's state slot and the cell.
pub fn state_jacobian(net: &ColumnarNetwork, rec: &StepRecord) -> DenseMatrix {
    let l = net.layout();
    let (c, w) = (l.columns, l.width);
    let mut jac = DenseMatrix::zeros(c, c).expect("C >= 1");
    if net.config().cell == CellKind::Static {
        return jac;
    }
    // v[k] = ∂f[k]/∂h_{k/W}(t−1)
    let mut v = vec![0.0; c * w];
    for j in 0..c {
        let span = j * w..(j + 1) * w;
        let t = column_slot_tangent(&net.column(j), &rec.a1[span.clone()], &rec.a2[span.clone()]);
        v[span].copy_from_slice(&t);
    }
    let cell = net.cell();
    let mask = net.mask();
    // per-block contraction Σ_{k ∈ block j, active} U[k]·v[k], plus R_ij
    let block_terms = |gate: Gate, i: usize| -> (Vec<f64>, Vec<f64>) {
        let u = cell.u_row(gate, i);
        let mut ut = vec![0.0; c];
        for &k in mask.u_active(i) {
            ut[k / w] += u[k] * v[k];
        }
        let r = cell.r_row(gate, i);
        let mut rt = vec![0.0; c];
        for &j in mask.r_active(i) {
            rt[j] = r[j];
        }
        opcount::add(2 * mask.u_active(i).len());
        (ut, rt)
    };
    for i in 0..c {
        let row = jac.row_mut(i);
        match &rec.cell {
            CellCache::Additive { pre } => {
                let t = pre[i].tanh();
                let d = 1.0 - t * t;
                let (ut, rt) = block_terms(Gate::Candidate, i);
                for j in 0..c {
                    row[j] = d * (ut[j] + rt[j]);
                }
                row[i] += 1.0;
            }
            CellCache::Gru { az, ar, q, an } => {
                let z = sigmoid(az[i]);
                let r = sigmoid(ar[i]);
                let n = an[i].tanh();
                let (utz, rtz) = block_terms(Gate::Update, i);
                let (utr, rtr) = block_terms(Gate::Reset, i);
                let (utn, rtn) = block_terms(Gate::Candidate, i);
                let hp = rec.h_prev[i];
                for j in 0..c {
                    let daz = utz[j] + rtz[j];
                    let dar = utr[j] + rtr[j];
                    let dan = utn[j] + r * rtn[j] + q[i] * r * (1.0 - r) * dar;
                    row[j] = (n - hp) * z * (1.0 - z) * daz + z * (1.0 - n * n) * dan;
                }
                row[i] += 1.0 - z;
            }
            CellCache::Static { .. } => unreachable!("handled above"),
        }
        opcount::add(8 * c);
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_network, NetConfig};
    use crate::numkit::RngStream;

    fn random_net(c: usize, w: usize, cell: CellKind, s: f64, seed: u64) -> (ColumnarNetwork, StepRecord) {
        let net = build_network(&NetConfig::new(c, w, 3, cell, s), &RngStream::new(seed)).unwrap();
        let mut rng = RngStream::new(seed + 1000);
        let h_prev: Vec<f64> = (0..c).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let x: Vec<f64> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let rec = net.rnn_step(&x, &h_prev).unwrap();
        (net, rec)
    }

    fn h_of(net: &ColumnarNetwork, x: &[f64], h_prev: &[f64]) -> Vec<f64> {
        net.rnn_step(x, h_prev).unwrap().h
    }

    #[test]
    fn state_jacobian_matches_central_differences() {
        for cell in [CellKind::AdditiveTanh, CellKind::GruColumn] {
            for seed in 0..4 {
                let (net, rec) = random_net(2, 5, cell, 100.0, seed);
                let jac = state_jacobian(&net, &rec);
                let eps = 1e-5;
                for j in 0..2 {
                    let mut up = rec.h_prev.clone();
                    up[j] += eps;
                    let mut dn = rec.h_prev.clone();
                    dn[j] -= eps;
                    let (hu, hd) = (h_of(&net, &rec.x, &up), h_of(&net, &rec.x, &dn));
                    for i in 0..2 {
                        let fd = (hu[i] - hd[i]) / (2.0 * eps);
                        let an = jac.get(i, j);
                        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{cell} seed {seed} ({i},{j}): {fd} vs {an}");
                    }
                }
            }
        }
    }

    #[test]
    fn reverse_state_adjoint_matches_forward_jacobian() {
        for cell in [CellKind::AdditiveTanh, CellKind::GruColumn, CellKind::Static] {
            let (net, rec) = random_net(3, 4, cell, 100.0, 9);
            let jac = state_jacobian(&net, &rec);
            for i in 0..3 {
                let mut e = vec![0.0; 3];
                e[i] = 1.0;
                let adj = step_vjp(&net, &rec, &e, false, None);
                for j in 0..3 {
                    assert!((adj[j] - jac.get(i, j)).abs() <= 1e-12, "{cell} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn zero_cell_weights_give_unit_self_derivative() {
        let (mut net, _) = random_net(3, 2, CellKind::AdditiveTanh, 100.0, 2);
        let l = net.layout().clone();
        for i in 0..3 {
            let base = l.group_range(i).start;
            for k in l.u_row(Gate::Candidate).chain(l.r_row(Gate::Candidate)) {
                net.params_mut()[base + k] = 0.0;
            }
        }
        let rec = net.rnn_step(&[1.0, 0.0, 1.0], &[0.2, 0.4, -0.1]).unwrap();
        let adj = step_vjp(&net, &rec, &[1.0; 3], true, None);
        assert_eq!(adj, vec![1.0; 3]);
    }

    #[test]
    fn parameter_vjp_matches_central_differences() {
        for cell in [CellKind::AdditiveTanh, CellKind::GruColumn, CellKind::Static] {
            let (net, rec) = random_net(2, 3, cell, 100.0, 21);
            let proj = [0.7, -1.3];
            let mut grad = vec![0.0; net.layout().theta_len()];
            step_vjp(&net, &rec, &proj, false, Some(&mut grad));
            let eps = 1e-5;
            let scale = grad.iter().fold(1.0f64, |m, g| m.max(g.abs()));
            for p in 0..grad.len() {
                let mut params = net.params().to_vec();
                params[p] += eps;
                let hu = h_of(&net.with_params(params.clone()).unwrap(), &rec.x, &rec.h_prev);
                params[p] -= 2.0 * eps;
                let hd = h_of(&net.with_params(params).unwrap(), &rec.x, &rec.h_prev);
                let fd = (proj[0] * (hu[0] - hd[0]) + proj[1] * (hu[1] - hd[1])) / (2.0 * eps);
                assert!((fd - grad[p]).abs() <= 1e-6 * scale, "{cell} param {p}: {fd} vs {}", grad[p]);
            }
        }
    }
}
