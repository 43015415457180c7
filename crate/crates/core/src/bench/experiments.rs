use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gen_sequence, Estimator, Experiment, ExperimentConfig};
use crate::credit::{
    alignment_percent, bptt_full, master_user_accumulate, mean_abs_error, reverse_accumulate, tbptt,
    truncated_accumulate, GradEstimate,
};
use crate::error::{Error, Result};
use crate::meta::{meta_accumulate, LmsConfig};
use crate::network::{build_network, mask_feasible, ColumnarNetwork, Sequence};
use crate::numkit::RngStream;

/// One estimator on one (configuration, lateral ratio, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentRow {
    pub config_id: String,
    pub experiment: String,
    pub cell: String,
    #[serde(rename = "C")]
    pub columns: usize,
    #[serde(rename = "W")]
    pub width: usize,
    #[serde(rename = "T")]
    pub length: usize,
    pub s_percent: f64,
    #[serde(rename = "SS")]
    pub step_size: f64,
    pub estimator: String,
    pub seed: u64,
    pub alignment_percent: f64,
    pub mae: f64,
    pub wallclock_ns: u64,
}

/// Splits the configured lateral ratios into those the mask sampler can
/// realize and those it cannot (too few lateral slots).
pub fn feasible_ratios(cfg: &ExperimentConfig) -> (Vec<f64>, Vec<f64>) {
    cfg.lateral_ratios.iter().partition(|&&s| {
        let mut net = cfg.net.clone();
        net.lateral_ratio = s;
        mask_feasible(&net)
    })
}

/// The network and sequence of seed `seed` at lateral ratio `s`.
pub fn instance(cfg: &ExperimentConfig, s: f64, seed: u64) -> Result<(ColumnarNetwork, Sequence)> {
    let base = RngStream::new(cfg.master_seed).fork(seed);
    let mut net_cfg = cfg.net.clone();
    net_cfg.lateral_ratio = s;
    let net = build_network(&net_cfg, &base)?;
    let seq = gen_sequence(&cfg.seq, &mut base.fork(2))?;
    Ok((net, seq))
}

struct Scored {
    estimator: Estimator,
    estimate: GradEstimate,
    nanos: u64,
}

fn timed<T>(on: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, u64)> {
    if on {
        let start = Instant::now();
        let v = f()?;
        Ok((v, start.elapsed().as_nanos() as u64))
    } else {
        Ok((f()?, 0))
    }
}

fn rows_for(
    cfg: &ExperimentConfig,
    experiment: Experiment,
    step_size: f64,
    s: f64,
    seed: u64,
    truth: &GradEstimate,
    scored: Vec<Scored>,
) -> Result<Vec<AlignmentRow>> {
    let mut id_cfg = cfg.clone();
    id_cfg.experiment = experiment;
    id_cfg.step_size = step_size;
    let config_id = id_cfg.config_id();
    scored
        .into_iter()
        .map(|sc| {
            Ok(AlignmentRow {
                config_id: config_id.clone(),
                experiment: experiment.to_string(),
                cell: cfg.net.cell.to_string(),
                columns: cfg.net.columns,
                width: cfg.net.width,
                length: cfg.seq.length,
                s_percent: s,
                step_size,
                estimator: sc.estimator.to_string(),
                seed,
                alignment_percent: alignment_percent(&sc.estimate.theta, &truth.theta)?,
                mae: mean_abs_error(&sc.estimate.theta, &truth.theta)?,
                wallclock_ns: sc.nanos,
            })
        })
        .collect()
}

fn rnn_cell(cfg: &ExperimentConfig, s: f64, seed: u64) -> Result<Vec<AlignmentRow>> {
    let (net, seq) = instance(cfg, s, seed)?;
    let tape = net.run(&seq)?;
    let truth = bptt_full(&net, &tape)?;
    let mut scored = Vec::new();
    for est in cfg.estimators() {
        let (estimate, nanos) = timed(cfg.timing, || match est {
            Estimator::MasterUser => master_user_accumulate(&net, &tape),
            Estimator::Tbptt(k) => tbptt(&net, &tape, k),
            Estimator::MasterUserAblated => Err(Error::InvalidArgument("ablation needs a learning readout".into())),
        })?;
        scored.push(Scored { estimator: est, estimate, nanos });
    }
    rows_for(cfg, Experiment::AlignRnn, 0.0, s, seed, &truth, scored)
}

fn meta_cell(cfg: &ExperimentConfig, experiment: Experiment, step_size: f64, s: f64, seed: u64) -> Result<Vec<AlignmentRow>> {
    let (net, seq) = instance(cfg, s, seed)?;
    let lms = LmsConfig::uniform(cfg.net.columns, step_size)?;
    let (run, mu_nanos) = timed(cfg.timing, || meta_accumulate(&net, &seq, &lms))?;
    let truth = reverse_accumulate(&net, &run.tape, Some(&lms.step_sizes))?;
    let mut scored = Vec::new();
    for est in cfg.estimators() {
        let (estimate, nanos) = match est {
            Estimator::MasterUser => (run.full.clone(), mu_nanos),
            Estimator::MasterUserAblated => (run.ablated.clone(), mu_nanos),
            Estimator::Tbptt(k) => timed(cfg.timing, || truncated_accumulate(&net, &run.tape, Some(&lms.step_sizes), k))?,
        };
        scored.push(Scored { estimator: est, estimate, nanos });
    }
    rows_for(cfg, experiment, step_size, s, seed, &truth, scored)
}

fn over_cells<F>(cfg: &ExperimentConfig, cell: F) -> Result<Vec<AlignmentRow>>
where
    F: Fn(f64, u64) -> Result<Vec<AlignmentRow>> + Sync,
{
    let (ratios, _) = feasible_ratios(cfg);
    let jobs: Vec<(f64, u64)> = ratios
        .iter()
        .flat_map(|&s| (0..cfg.seeds as u64).map(move |k| (s, k)))
        .collect();
    let parts: Vec<Vec<AlignmentRow>> = jobs.par_iter().map(|&(s, k)| cell(s, k)).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn expect(cfg: &ExperimentConfig, experiment: Experiment) -> Result<()> {
    if cfg.experiment != experiment {
        return Err(Error::InvalidArgument(format!(
            "configuration is for {}, not {experiment}",
            cfg.experiment
        )));
    }
    cfg.validate()
}

/// Recurrent alignment with a frozen readout against full BPTT. Lateral
/// ratios the mask cannot realize are skipped.
pub fn run_align_rnn(cfg: &ExperimentConfig) -> Result<Vec<AlignmentRow>> {
    expect(cfg, Experiment::AlignRnn)?;
    over_cells(cfg, |s, k| rnn_cell(cfg, s, k))
}

/// Meta alignment with an LMS readout against BPTT through learning.
pub fn run_align_meta(cfg: &ExperimentConfig) -> Result<Vec<AlignmentRow>> {
    expect(cfg, Experiment::AlignMeta)?;
    over_cells(cfg, |s, k| meta_cell(cfg, Experiment::AlignMeta, cfg.step_size, s, k))
}

/// Full and ablated meta credit on the additive cell.
pub fn run_meta_ablation(cfg: &ExperimentConfig) -> Result<Vec<AlignmentRow>> {
    expect(cfg, Experiment::MetaAblation)?;
    over_cells(cfg, |s, k| meta_cell(cfg, Experiment::MetaAblation, cfg.step_size, s, k))
}

/// Meta alignment for every step size in `sweep_step_sizes`, on the same
/// weights, masks and data.
pub fn run_stepsize_sweep(cfg: &ExperimentConfig) -> Result<Vec<AlignmentRow>> {
    expect(cfg, Experiment::StepSizeSweep)?;
    let mut rows = Vec::new();
    for &ss in &cfg.sweep_step_sizes {
        rows.extend(over_cells(cfg, |s, k| meta_cell(cfg, Experiment::StepSizeSweep, ss, s, k))?);
    }
    Ok(rows)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<AlignmentRow>> {
    match cfg.experiment {
        Experiment::AlignRnn => run_align_rnn(cfg),
        Experiment::AlignMeta => run_align_meta(cfg),
        Experiment::MetaAblation => run_meta_ablation(cfg),
        Experiment::StepSizeSweep => run_stepsize_sweep(cfg),
        Experiment::Decay => Err(Error::InvalidArgument("use run_decay for the decay probe".into())),
    }
}
