use crate::error::{check_len, Result};

/// Flat gradient over the recurrent parameters in canonical order, plus
/// optionally the readout gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct GradEstimate {
    pub theta: Vec<f64>,
    pub readout: Option<Vec<f64>>,
}

impl GradEstimate {
    pub fn zeros(theta_len: usize) -> Self {
        Self {
            theta: vec![0.0; theta_len],
            readout: None,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().chain(self.readout.iter().flatten()).all(|v| v.is_finite())
    }

    pub fn norm_inf(&self) -> f64 {
        self.theta.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn add(&mut self, other: &GradEstimate) {
        for (a, b) in self.theta.iter_mut().zip(&other.theta) {
            *a += b;
        }
        if let Some(ro) = &other.readout {
            let mine = self.readout.get_or_insert_with(|| vec![0.0; ro.len()]);
            for (a, b) in mine.iter_mut().zip(ro) {
                *a += b;
            }
        }
    }
}

/// Percentage of components whose sign agrees with `truth`. A component
/// counts as aligned when `est·truth > 0` or both are exactly zero.
pub fn alignment_percent(est: &[f64], truth: &[f64]) -> Result<f64> {
    check_len("gradient length", truth.len(), est.len())?;
    if est.is_empty() {
        return Ok(100.0);
    }
    let aligned = est
        .iter()
        .zip(truth)
        .filter(|(&e, &t)| e * t > 0.0 || (e == 0.0 && t == 0.0))
        .count();
    Ok(100.0 * aligned as f64 / est.len() as f64)
}

pub fn mean_abs_error(est: &[f64], truth: &[f64]) -> Result<f64> {
    check_len("gradient length", truth.len(), est.len())?;
    if est.is_empty() {
        return Ok(0.0);
    }
    Ok(est.iter().zip(truth).map(|(e, t)| (e - t).abs()).sum::<f64>() / est.len() as f64)
}

/// `‖est − truth‖_∞ / ‖truth‖_∞` (absolute when `truth` is all zeros).
pub fn rel_inf_deviation(est: &[f64], truth: &[f64]) -> Result<f64> {
    check_len("gradient length", truth.len(), est.len())?;
    let dev = est.iter().zip(truth).fold(0.0f64, |m, (e, t)| m.max((e - t).abs()));
    let scale = truth.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    Ok(if scale > 0.0 { dev / scale } else { dev })
}
