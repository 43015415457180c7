use std::fs;
use std::path::Path;

use colnet::bench::{appendix_grid, DecayConfig, Experiment, ExperimentConfig};
use serde_json::Value;

use crate::args::{DecayArgs, ExperimentArgs};
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("config {} is not valid JSON: {e}", path.display())))
}

/// Overlays `top` onto `base`, recursing into objects.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn file_experiment(file: &Value) -> Result<Option<Experiment>, CliError> {
    match file.get("experiment") {
        None => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| usage(format!("invalid experiment in config: {e}"))),
    }
}

fn apply_flags(cfg: &mut ExperimentConfig, a: &ExperimentArgs) -> Result<(), CliError> {
    if let Some(v) = a.common.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = a.common.seeds {
        cfg.seeds = v;
    }
    if let Some(v) = a.columns {
        cfg.net.columns = v;
    }
    if let Some(v) = a.width {
        cfg.net.width = v;
    }
    if let Some(v) = a.length {
        cfg.seq.length = v;
    }
    if let Some(v) = a.input_dim {
        cfg.net.input_dim = v;
        cfg.seq.input_dim = v;
    }
    if let Some(v) = &a.s_list {
        cfg.lateral_ratios = v.clone();
    }
    if let Some(v) = &a.windows {
        cfg.truncation_windows = v.clone();
        cfg.estimators = None;
    }
    if let Some(v) = &a.step_size {
        if cfg.experiment == Experiment::StepSizeSweep {
            cfg.sweep_step_sizes = v.clone();
        } else if let [ss] = v[..] {
            cfg.step_size = ss;
        } else {
            return Err(usage("--step-size takes a single value for this command"));
        }
    }
    if let Some(v) = a.cell {
        cfg.net.cell = v;
    }
    if let Some(v) = a.mask_r {
        cfg.net.mask_r = v;
    }
    if a.timing {
        cfg.timing = true;
    }
    Ok(())
}

/// Defaults for `experiment`, overlaid with the config file, then flags.
pub fn experiment_config(experiment: Experiment, a: &ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    let mut value = serde_json::to_value(ExperimentConfig::defaults(experiment)).expect("serializable defaults");
    if let Some(path) = &a.common.config {
        let file = read_json(path)?;
        if let Some(e) = file_experiment(&file)? {
            if e != experiment {
                return Err(usage(format!("config is for {e}, not {experiment}")));
            }
        }
        merge(&mut value, file);
    }
    let mut cfg: ExperimentConfig = serde_json::from_value(value).map_err(|e| usage(format!("invalid config: {e}")))?;
    apply_flags(&mut cfg, a)?;
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

/// Without `--config`, the architecture grid filtered by `--columns`,
/// `--width` and `--step-size`, with the remaining flags applied to every
/// entry. With `--config`, that single configuration.
pub fn sweep_configs(a: &ExperimentArgs) -> Result<Vec<ExperimentConfig>, CliError> {
    if let Some(path) = &a.common.config {
        let file = read_json(path)?;
        let experiment = file_experiment(&file)?.ok_or_else(|| usage("sweep config must name its experiment"))?;
        return Ok(vec![experiment_config(experiment, a)?]);
    }
    let mut out = Vec::new();
    for mut cfg in appendix_grid(a.common.seeds.unwrap_or(30), a.common.seed.unwrap_or(0)) {
        if a.columns.is_some_and(|c| c != cfg.net.columns) || a.width.is_some_and(|w| w != cfg.net.width) {
            continue;
        }
        if let Some(ss) = &a.step_size {
            if cfg.experiment.uses_lms() && !ss.contains(&cfg.step_size) {
                continue;
            }
        }
        let mut flags = a.clone();
        flags.step_size = None;
        if cfg.experiment != Experiment::AlignRnn {
            flags.cell = None;
        }
        apply_flags(&mut cfg, &flags)?;
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        out.push(cfg);
    }
    if out.is_empty() {
        return Err(usage("no grid configuration matches the given filters"));
    }
    Ok(out)
}

pub fn decay_config(a: &DecayArgs) -> Result<DecayConfig, CliError> {
    let mut value = serde_json::to_value(DecayConfig::default()).expect("serializable defaults");
    if let Some(path) = &a.common.config {
        merge(&mut value, read_json(path)?);
    }
    let mut cfg: DecayConfig = serde_json::from_value(value).map_err(|e| usage(format!("invalid config: {e}")))?;
    if let Some(v) = a.hidden {
        cfg.hidden = v;
    }
    if let Some(v) = a.steps {
        cfg.steps = v;
    }
    if let Some(v) = a.common.seeds {
        cfg.seeds = v;
    }
    if let Some(v) = a.common.seed {
        cfg.master_seed = v;
    }
    if cfg.hidden == 0 || cfg.seeds == 0 {
        return Err(usage("decay needs --hidden >= 1 and --seeds >= 1"));
    }
    Ok(cfg)
}
