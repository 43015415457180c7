use colnet::credit::*;
use colnet::network::{build_network, CellKind, ColumnarNetwork, NetConfig, Sequence};
use colnet::numkit::{opcount, RngStream};
use proptest::prelude::*;

fn net(c: usize, w: usize, d: usize, cell: CellKind, s: f64, seed: u64) -> ColumnarNetwork {
    build_network(&NetConfig::new(c, w, d, cell, s), &RngStream::new(seed)).unwrap()
}

fn seq(d: usize, t: usize, seed: u64) -> Sequence {
    let mut rng = RngStream::with_stream(seed, 77);
    let inputs = (0..t)
        .map(|_| (0..d).map(|_| if rng.coin() { 1.0 } else { 0.0 }).collect())
        .collect();
    let targets = (0..t).map(|_| rng.uniform(-5.0, 5.0)).collect();
    Sequence::new(inputs, targets).unwrap()
}

const CELLS: [CellKind; 3] = [CellKind::AdditiveTanh, CellKind::Static, CellKind::GruColumn];

#[test]
fn single_pass_matches_per_state_passes_bitwise() {
    for cell in CELLS {
        for s in [0.0, 10.0, 100.0] {
            let n = net(4, 5, 3, cell, s, 3);
            let tape = n.run(&seq(3, 6, 1)).unwrap();
            for rec in tape.records() {
                let a = local_grads_single_pass(&n, rec).unwrap();
                let b = local_grads_per_state(&n, rec).unwrap();
                assert_eq!(a, b, "{cell} s={s}");
            }
        }
    }
}

#[test]
fn isolated_columns_make_all_estimators_agree() {
    for cell in CELLS {
        let n = net(3, 6, 4, cell, 0.0, 11);
        let tape = n.run(&seq(4, 12, 2)).unwrap();
        let bptt = bptt_full(&n, &tape).unwrap();
        let mu = master_user_accumulate(&n, &tape).unwrap();
        let rtrl = rtrl_accumulate(&n, &tape).unwrap();
        assert!(rel_inf_deviation(&mu.theta, &bptt.theta).unwrap() < 1e-10, "{cell}");
        assert!(rel_inf_deviation(&rtrl.theta, &bptt.theta).unwrap() < 1e-10, "{cell}");
        assert_eq!(alignment_percent(&mu.theta, &bptt.theta).unwrap(), 100.0, "{cell}");
    }
}

#[test]
fn rtrl_matches_bptt_with_dense_lateral_connections() {
    for cell in CELLS {
        let n = net(4, 5, 3, cell, 300.0, 5);
        let tape = n.run(&seq(3, 10, 4)).unwrap();
        let bptt = bptt_full(&n, &tape).unwrap();
        let rtrl = rtrl_accumulate(&n, &tape).unwrap();
        assert!(rel_inf_deviation(&rtrl.theta, &bptt.theta).unwrap() < 1e-10, "{cell}");
    }
}

#[test]
fn bptt_matches_finite_differences_off_kinks() {
    for cell in CELLS {
        let n = net(3, 4, 3, cell, 100.0, 8);
        let sq = seq(3, 5, 6);
        let tape = n.run(&sq).unwrap();
        let bptt = bptt_full(&n, &tape).unwrap();
        let fd = finite_diff(&n, &sq, 1e-5).unwrap();
        let exact: Vec<f64> = bptt.theta.iter().chain(bptt.readout.as_ref().unwrap()).copied().collect();
        let approx: Vec<f64> = fd.grad.theta.iter().chain(fd.grad.readout.as_ref().unwrap()).copied().collect();
        let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut checked = 0;
        for p in 0..exact.len() {
            if !fd.kink[p] {
                checked += 1;
                assert!((exact[p] - approx[p]).abs() <= 1e-6 * scale, "{cell} p={p} {} vs {}", exact[p], approx[p]);
            }
        }
        assert!(checked > exact.len() / 2);
    }
}

#[test]
fn truncation_window_covering_sequence_is_untruncated() {
    for cell in CELLS {
        let n = net(4, 5, 3, cell, 100.0, 9);
        let tape = n.run(&seq(3, 8, 3)).unwrap();
        let full = bptt_full(&n, &tape).unwrap();
        for k in [8, 20] {
            let tr = tbptt(&n, &tape, k).unwrap();
            assert!(rel_inf_deviation(&tr.theta, &full.theta).unwrap() < 1e-12, "{cell}");
            assert_eq!(alignment_percent(&tr.theta, &full.theta).unwrap(), 100.0);
        }
    }
}

#[test]
fn truncation_rejects_empty_window() {
    let n = net(2, 3, 2, CellKind::AdditiveTanh, 0.0, 1);
    let tape = n.run(&seq(2, 3, 1)).unwrap();
    assert!(tbptt(&n, &tape, 0).is_err());
}

#[test]
fn static_cell_needs_no_history() {
    let n = net(3, 4, 3, CellKind::Static, 200.0, 4);
    let tape = n.run(&seq(3, 7, 9)).unwrap();
    let full = bptt_full(&n, &tape).unwrap();
    let one = tbptt(&n, &tape, 1).unwrap();
    assert!(rel_inf_deviation(&one.theta, &full.theta).unwrap() < 1e-12);
}

#[test]
fn trace_is_telescoped_local_gradient_without_lateral_paths() {
    let n = net(3, 4, 3, CellKind::AdditiveTanh, 0.0, 21);
    let tape = n.run(&seq(3, 9, 5)).unwrap();
    let mut trace = MasterUserTrace::new(n.layout());
    let mut rtrl = RtrlState::new(&n).unwrap();
    for rec in tape.records() {
        master_user_update(&mut trace, &local_grads_single_pass(&n, rec).unwrap());
        rtrl_full(&n, &mut rtrl, rec).unwrap();
        for i in 0..3 {
            let r = n.layout().group_range(i);
            let row = &rtrl.row(i)[r];
            assert!(rel_inf_deviation(trace.group(i), row).unwrap() < 1e-12);
        }
    }
    assert_eq!(trace.steps(), 9);
}

#[test]
fn zero_weight_trace_sums_local_gradients() {
    let mut n = net(2, 3, 2, CellKind::AdditiveTanh, 0.0, 2);
    n.params_mut().iter_mut().for_each(|p| *p = 0.0);
    let tape = n.run(&seq(2, 5, 1)).unwrap();
    let mut trace = MasterUserTrace::new(n.layout());
    let mut sum = vec![0.0; n.layout().theta_len()];
    for rec in tape.records() {
        let lg = local_grads_single_pass(&n, rec).unwrap();
        assert!(lg.d_hprev.iter().all(|&d| d == 1.0));
        for (s, g) in sum.iter_mut().zip(&lg.d_theta) {
            *s += g;
        }
        master_user_update(&mut trace, &lg);
    }
    assert_eq!(trace.values(), &sum[..]);
}

#[test]
fn credit_includes_readout_when_asked() {
    let n = net(2, 3, 2, CellKind::AdditiveTanh, 0.0, 2);
    let tape = n.run(&seq(2, 1, 1)).unwrap();
    let rec = tape.get(0).unwrap();
    let mut trace = MasterUserTrace::new(n.layout());
    master_user_update(&mut trace, &local_grads_single_pass(&n, rec).unwrap());
    let c = master_user_credit(&trace, rec.delta, &rec.w, Some(&rec.h)).unwrap();
    let want: Vec<f64> = rec.h.iter().map(|h| -rec.delta * h).collect();
    assert_eq!(c.readout.unwrap(), want);
    assert!(master_user_credit(&trace, 1.0, &[1.0], None).is_err());
}

#[test]
fn finite_difference_exact_on_quadratic_readout() {
    let n = net(3, 4, 3, CellKind::AdditiveTanh, 0.0, 6);
    let sq = seq(3, 4, 2);
    let fd = finite_diff(&n, &sq, 1e-3).unwrap();
    let exact = bptt_full(&n, &n.run(&sq).unwrap()).unwrap().readout.unwrap();
    let got = fd.grad.readout.unwrap();
    assert!(rel_inf_deviation(&got, &exact).unwrap() < 1e-8);
    assert!(finite_diff(&n, &sq, 0.0).is_err());
}

#[test]
fn finite_difference_of_empty_sequence_is_zero() {
    let n = net(2, 3, 2, CellKind::GruColumn, 0.0, 6);
    let fd = finite_diff(&n, &seq(2, 0, 1), 1e-5).unwrap();
    assert!(fd.grad.theta.iter().all(|&v| v == 0.0));
}

#[test]
fn rtrl_refuses_huge_networks() {
    let n = net(20, 100, 50, CellKind::AdditiveTanh, 0.0, 1);
    assert!(n.layout().theta_len() > RTRL_MAX_PARAMS);
    assert!(RtrlState::new(&n).is_err());
}

#[test]
fn mismatched_record_is_rejected() {
    let a = net(2, 3, 2, CellKind::AdditiveTanh, 0.0, 1);
    let b = net(3, 3, 2, CellKind::AdditiveTanh, 0.0, 1);
    let tape = b.run(&seq(2, 2, 1)).unwrap();
    assert!(local_grads_single_pass(&a, tape.get(0).unwrap()).is_err());
    assert!(bptt_full(&a, &tape).is_err());
}

#[test]
fn master_user_cost_is_linear_in_width() {
    let mut widths = Vec::new();
    let mut costs = Vec::new();
    for w in [5, 10, 20, 40] {
        let n = net(3, w, 4, CellKind::AdditiveTanh, 10.0, 1);
        let tape = n.run(&seq(4, 1, 1)).unwrap();
        let (_, ops) = opcount::measure(|| {
            let mut mu = MasterUser::new(n.layout());
            mu.observe(&n, tape.get(0).unwrap()).unwrap();
        });
        widths.push(n.layout().theta_len() as f64);
        costs.push(ops as f64);
    }
    let ratio: Vec<f64> = costs.iter().zip(&widths).map(|(c, p)| c / p).collect();
    let (lo, hi) = ratio.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 1.5, "{ratio:?}");
}

#[test]
fn gradient_dump_has_one_row_per_component() {
    let n = net(2, 3, 2, CellKind::AdditiveTanh, 0.0, 1);
    let tape = n.run(&seq(2, 3, 1)).unwrap();
    let g = bptt_full(&n, &tape).unwrap();
    let mut buf = Vec::new();
    write_grad_dump(&mut buf, n.layout(), &[("bptt", &g)]).unwrap();
    let mut rdr = csv::Reader::from_reader(&buf[..]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), n.layout().total_len());
    assert_eq!(&rows.last().unwrap()[1], "readout");
    let v: f64 = rows[0][3].parse().unwrap();
    assert_eq!(v, g.theta[0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_ignores_masked_lateral_weights(seed in 0u64..1000, garbage in -5.0f64..5.0) {
        let n = net(3, 4, 3, CellKind::GruColumn, 25.0, seed);
        let mut poisoned = n.clone();
        let l = n.layout().clone();
        for i in 0..3 {
            let active = n.mask().u_active(i).to_vec();
            for &g in l.gate_list() {
                let r = l.u_row(g);
                let base = l.group_range(i).start + r.start;
                for k in 0..r.len() {
                    if active.binary_search(&k).is_err() {
                        poisoned.params_mut()[base + k] = garbage;
                    }
                }
            }
        }
        let sq = seq(3, 5, seed);
        let a = master_user_accumulate(&n, &n.run(&sq).unwrap()).unwrap();
        let b = master_user_accumulate(&poisoned, &poisoned.run(&sq).unwrap()).unwrap();
        prop_assert_eq!(&a.theta, &b.theta);
    }

    #[test]
    fn truncation_error_never_grows_with_window_on_static_cell(seed in 0u64..1000, k in 1usize..6) {
        let n = net(2, 3, 2, CellKind::Static, 100.0, seed);
        let tape = n.run(&seq(2, 6, seed)).unwrap();
        let full = bptt_full(&n, &tape).unwrap();
        let tr = tbptt(&n, &tape, k).unwrap();
        prop_assert!(rel_inf_deviation(&tr.theta, &full.theta).unwrap() < 1e-12);
    }
}
