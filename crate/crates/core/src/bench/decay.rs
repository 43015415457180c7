use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::standard::{StandardCell, StandardKind};
use crate::numkit::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub hidden: usize,
    pub steps: usize,
    pub seeds: usize,
    #[serde(default)]
    pub master_seed: u64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            hidden: 50,
            steps: 20,
            seeds: 30,
            master_seed: 0,
        }
    }
}

/// Mean `|h|` over units and seeds at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub cell: String,
    pub bias: bool,
    pub step: usize,
    pub mean_abs_state: f64,
    pub stderr: f64,
    pub n: usize,
}

const VARIANTS: [(StandardKind, bool); 4] = [
    (StandardKind::Lstm, false),
    (StandardKind::Lstm, true),
    (StandardKind::Gru, false),
    (StandardKind::Gru, true),
];

fn trajectory(kind: StandardKind, bias: bool, cfg: &DecayConfig, seed: u64) -> Result<Vec<f64>> {
    let mut rng = RngStream::new(cfg.master_seed).fork(seed).fork(3 + 2 * kind as u64 + bias as u64);
    let cell = StandardCell::init(kind, cfg.hidden, cfg.hidden, bias, &mut rng)?;
    let x = vec![0.0; cfg.hidden];
    let mut h = vec![1.0; cfg.hidden];
    let mut c = vec![1.0; cfg.hidden];
    let mean_abs = |v: &[f64]| v.iter().map(|a| a.abs()).sum::<f64>() / v.len() as f64;
    let mut out = vec![mean_abs(&h)];
    for _ in 0..cfg.steps {
        let (hn, cn) = cell.step(&h, &c, &x)?;
        h = hn;
        c = cn;
        out.push(mean_abs(&h));
    }
    Ok(out)
}

/// Starts LSTM and GRU cells (with and without biases) from an all-ones
/// state, feeds zero input and records the mean absolute hidden state at
/// steps `0..=steps`.
pub fn run_decay(cfg: &DecayConfig) -> Result<Vec<DecayRow>> {
    if cfg.hidden == 0 || cfg.seeds == 0 {
        return Err(Error::InvalidArgument("decay probe needs hidden >= 1 and seeds >= 1".into()));
    }
    let mut rows = Vec::new();
    for (kind, bias) in VARIANTS {
        let runs: Vec<Vec<f64>> = (0..cfg.seeds as u64)
            .into_par_iter()
            .map(|k| trajectory(kind, bias, cfg, k))
            .collect::<Result<_>>()?;
        let n = runs.len() as f64;
        for step in 0..=cfg.steps {
            let vals: Vec<f64> = runs.iter().map(|r| r[step]).collect();
            let mean = vals.iter().sum::<f64>() / n;
            let stderr = if runs.len() > 1 {
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
            } else {
                0.0
            };
            rows.push(DecayRow {
                cell: kind.name().to_string(),
                bias,
                step,
                mean_abs_state: mean,
                stderr,
                n: runs.len(),
            });
        }
    }
    Ok(rows)
}
