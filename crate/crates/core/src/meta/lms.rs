use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::network::{ColumnarNetwork, Sequence, StepTape};

/// Per-weight LMS step sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmsConfig {
    pub step_sizes: Vec<f64>,
}

impl LmsConfig {
    /// Zero step sizes are accepted and disable learning.
    pub fn new(step_sizes: Vec<f64>) -> Result<Self> {
        if step_sizes.is_empty() {
            return Err(Error::InvalidArgument("need at least one step size".into()));
        }
        if let Some(a) = step_sizes.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidArgument(format!("step size must be finite and non-negative, got {a}")));
        }
        Ok(Self { step_sizes })
    }

    pub fn uniform(columns: usize, step_size: f64) -> Result<Self> {
        Self::new(vec![step_size; columns])
    }

    pub fn columns(&self) -> usize {
        self.step_sizes.len()
    }
}

/// `w_i + α_i·δ·h_i`
pub fn lms_step(w: &[f64], cfg: &LmsConfig, delta: f64, h: &[f64]) -> Result<Vec<f64>> {
    check_len("readout weights", cfg.columns(), w.len())?;
    check_len("state", cfg.columns(), h.len())?;
    Ok(w.iter()
        .zip(&cfg.step_sizes)
        .zip(h)
        .map(|((&w, &a), &h)| w + a * delta * h)
        .collect())
}

/// Runs `seq` from `h(0) = 0` and the network's readout, applying an LMS
/// step after every prediction. Each record keeps the `w` it predicted with.
pub fn run_with_lms(net: &ColumnarNetwork, seq: &Sequence, cfg: &LmsConfig) -> Result<StepTape> {
    check_len("step sizes", net.layout().columns, cfg.columns())?;
    let mut tape = StepTape::new();
    let mut h = vec![0.0; net.layout().columns];
    let mut w = net.readout().to_vec();
    for (x, &target) in seq.inputs.iter().zip(&seq.targets) {
        let mut rec = net.step_with_readout(x, &h, &w)?;
        rec.set_target(target);
        w = lms_step(&w, cfg, rec.delta, &rec.h)?;
        h = rec.h.clone();
        tape.push(rec);
    }
    Ok(tape)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_update() {
        let cfg = LmsConfig::new(vec![1e-2]).unwrap();
        let w = lms_step(&[1.0], &cfg, 2.0, &[3.0]).unwrap();
        assert!((w[0] - 1.06).abs() < 1e-15);
    }

    #[test]
    fn zero_error_is_fixed_point() {
        let cfg = LmsConfig::uniform(3, 0.5).unwrap();
        let w = [0.1, -0.2, 0.3];
        assert_eq!(lms_step(&w, &cfg, 0.0, &[1.0, 2.0, 3.0]).unwrap(), w.to_vec());
    }

    #[test]
    fn rejects_bad_step_sizes() {
        assert!(LmsConfig::new(vec![]).is_err());
        assert!(LmsConfig::new(vec![-1e-3]).is_err());
        assert!(LmsConfig::new(vec![f64::NAN]).is_err());
        let cfg = LmsConfig::uniform(2, 0.1).unwrap();
        assert!(lms_step(&[1.0], &cfg, 1.0, &[1.0, 1.0]).is_err());
    }
}
