use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SequenceSpec;
use crate::error::{Error, Result};
use crate::network::{CellKind, NetConfig};

pub const DEFAULT_LATERAL_RATIOS: [f64; 8] = [0.0, 1.0, 5.0, 10.0, 50.0, 100.0, 500.0, 1000.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    AlignRnn,
    AlignMeta,
    MetaAblation,
    Decay,
    #[serde(rename = "stepsize-sweep")]
    StepSizeSweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::AlignRnn => "align-rnn",
            Experiment::AlignMeta => "align-meta",
            Experiment::MetaAblation => "meta-ablation",
            Experiment::Decay => "decay",
            Experiment::StepSizeSweep => "stepsize-sweep",
        }
    }

    pub fn uses_lms(self) -> bool {
        matches!(self, Experiment::AlignMeta | Experiment::MetaAblation | Experiment::StepSizeSweep)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    MasterUser,
    /// Meta credit without the `TW` term.
    MasterUserAblated,
    Tbptt(usize),
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::MasterUser => f.write_str("master_user"),
            Estimator::MasterUserAblated => f.write_str("master_user_ablated"),
            Estimator::Tbptt(k) => write!(f, "tbptt_{k}"),
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "master_user" => Ok(Estimator::MasterUser),
            "master_user_ablated" => Ok(Estimator::MasterUserAblated),
            other => other
                .strip_prefix("tbptt_")
                .and_then(|k| k.parse().ok())
                .filter(|&k: &usize| k >= 1)
                .map(Estimator::Tbptt)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown estimator '{other}'"))),
        }
    }
}

impl Serialize for Estimator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Estimator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn default_sweep_step_sizes() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub net: NetConfig,
    #[serde(default)]
    pub seq: SequenceSpec,
    pub lateral_ratios: Vec<f64>,
    #[serde(default)]
    pub truncation_windows: Vec<usize>,
    /// LMS step size of the readout; ignored without LMS.
    #[serde(default)]
    pub step_size: f64,
    /// Step sizes visited by the step-size sweep.
    #[serde(default = "default_sweep_step_sizes")]
    pub sweep_step_sizes: Vec<f64>,
    pub seeds: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Overrides the estimator list implied by the experiment and windows.
    #[serde(default)]
    pub estimators: Option<Vec<Estimator>>,
    /// Record per-estimator wall-clock time. Off by default so that rows
    /// are reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    /// Desk-scale defaults: C=20, W=50, T=50, 50 inputs, 30 seeds.
    pub fn defaults(experiment: Experiment) -> Self {
        let (cell, windows, ss) = match experiment {
            Experiment::AlignRnn => (CellKind::AdditiveTanh, vec![1, 3, 5, 20, 40], 0.0),
            Experiment::AlignMeta | Experiment::StepSizeSweep => (CellKind::Static, vec![1, 5, 10, 40], 1e-2),
            Experiment::MetaAblation => (CellKind::AdditiveTanh, vec![], 1e-2),
            Experiment::Decay => (CellKind::AdditiveTanh, vec![], 0.0),
        };
        Self {
            experiment,
            net: NetConfig::new(20, 50, 50, cell, 0.0),
            seq: SequenceSpec::default(),
            lateral_ratios: DEFAULT_LATERAL_RATIOS.to_vec(),
            truncation_windows: windows,
            step_size: ss,
            sweep_step_sizes: default_sweep_step_sizes(),
            seeds: 30,
            master_seed: 0,
            estimators: None,
            timing: false,
        }
    }

    pub fn estimators(&self) -> Vec<Estimator> {
        if let Some(e) = &self.estimators {
            return e.clone();
        }
        let mut out = vec![Estimator::MasterUser];
        if self.experiment == Experiment::MetaAblation {
            out.push(Estimator::MasterUserAblated);
        }
        out.extend(self.truncation_windows.iter().map(|&k| Estimator::Tbptt(k)));
        out
    }

    /// Identifies the architecture and step size; lateral ratio and seed
    /// are separate row fields.
    pub fn config_id(&self) -> String {
        let mut id = format!(
            "{}-{}-C{}-W{}-T{}",
            self.experiment, self.net.cell, self.net.columns, self.net.width, self.seq.length
        );
        if self.experiment.uses_lms() {
            id.push_str(&format!("-SS{}", self.step_size));
        }
        id
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        self.seq.validate()?;
        let mut net = self.net.clone();
        net.lateral_ratio = 0.0;
        net.validate()?;
        if self.seq.input_dim != self.net.input_dim {
            return bad(format!(
                "sequence input size {} differs from network input size {}",
                self.seq.input_dim, self.net.input_dim
            ));
        }
        if self.seeds == 0 {
            return bad("need at least one seed".into());
        }
        if self.lateral_ratios.is_empty() {
            return bad("need at least one lateral ratio".into());
        }
        if let Some(s) = self.lateral_ratios.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return bad(format!("lateral ratio must be finite and non-negative, got {s}"));
        }
        if self.truncation_windows.contains(&0) {
            return bad("truncation windows must be at least 1".into());
        }
        let ss_ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ss_ok(self.step_size) || !self.sweep_step_sizes.iter().all(|&v| ss_ok(v)) {
            return bad("step sizes must be finite and non-negative".into());
        }
        match self.experiment {
            Experiment::AlignMeta | Experiment::StepSizeSweep if self.net.cell != CellKind::Static => {
                return bad(format!("{} runs on the static cell", self.experiment));
            }
            Experiment::MetaAblation if self.net.cell != CellKind::AdditiveTanh => {
                return bad("meta-ablation runs on the additive cell".into());
            }
            Experiment::StepSizeSweep if self.sweep_step_sizes.is_empty() => {
                return bad("step-size sweep needs at least one step size".into());
            }
            Experiment::Decay => return bad("the decay probe is configured with DecayConfig".into()),
            _ => {}
        }
        let estimators = self.estimators();
        if estimators.is_empty() {
            return bad("no estimators selected".into());
        }
        if estimators.contains(&Estimator::MasterUserAblated) && !self.experiment.uses_lms() {
            return bad("the ablated estimator needs a learning readout".into());
        }
        Ok(())
    }
}

/// The architecture grid: C, W ∈ {5, 10, 20, 50, 100} for the recurrent
/// experiment, and additionally SS ∈ {1e−1, 1e−2, 1e−3} for the meta one.
pub fn appendix_grid(seeds: usize, master_seed: u64) -> Vec<ExperimentConfig> {
    const SIZES: [usize; 5] = [5, 10, 20, 50, 100];
    let mut out = Vec::new();
    for &c in &SIZES {
        for &w in &SIZES {
            let mut cfg = ExperimentConfig::defaults(Experiment::AlignRnn);
            cfg.net.columns = c;
            cfg.net.width = w;
            cfg.seeds = seeds;
            cfg.master_seed = master_seed;
            out.push(cfg);
        }
    }
    for &c in &SIZES {
        for &w in &SIZES {
            for ss in default_sweep_step_sizes() {
                let mut cfg = ExperimentConfig::defaults(Experiment::AlignMeta);
                cfg.net.columns = c;
                cfg.net.width = w;
                cfg.step_size = ss;
                cfg.seeds = seeds;
                cfg.master_seed = master_seed;
                out.push(cfg);
            }
        }
    }
    out
}
