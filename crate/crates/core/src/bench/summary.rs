use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AlignmentRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
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
    pub mean_mae: f64,
    pub stderr_mae: f64,
    pub mean_alignment: f64,
    pub stderr_alignment: f64,
    pub n: usize,
}

/// Mean and `sd/√n` (sample standard deviation); zero when `n = 1`.
fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Groups by (config, lateral ratio, estimator). Output is sorted by those
/// keys and seeds are summed in seed order, so the result does not depend
/// on row order.
pub fn summarize(rows: &[AlignmentRow]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("nothing to summarize".into()));
    }
    let mut groups: BTreeMap<(String, u64, String), Vec<&AlignmentRow>> = BTreeMap::new();
    for r in rows {
        // non-negative floats order like their bit patterns
        groups
            .entry((r.config_id.clone(), r.s_percent.to_bits(), r.estimator.clone()))
            .or_default()
            .push(r);
    }
    let mut out = Vec::with_capacity(groups.len());
    for (_, mut g) in groups {
        g.sort_by_key(|r| r.seed);
        let align: Vec<f64> = g.iter().map(|r| r.alignment_percent).collect();
        let mae: Vec<f64> = g.iter().map(|r| r.mae).collect();
        let (mean_alignment, stderr_alignment) = mean_stderr(&align);
        let (mean_mae, stderr_mae) = mean_stderr(&mae);
        let r = g[0];
        out.push(SummaryRow {
            config_id: r.config_id.clone(),
            experiment: r.experiment.clone(),
            cell: r.cell.clone(),
            columns: r.columns,
            width: r.width,
            length: r.length,
            s_percent: r.s_percent,
            step_size: r.step_size,
            estimator: r.estimator.clone(),
            mean_mae,
            stderr_mae,
            mean_alignment,
            stderr_alignment,
            n: g.len(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: u64, a: f64) -> AlignmentRow {
        AlignmentRow {
            config_id: "x".into(),
            experiment: "align-rnn".into(),
            cell: "additive".into(),
            columns: 2,
            width: 3,
            length: 5,
            s_percent: 0.0,
            step_size: 0.0,
            estimator: "master_user".into(),
            seed,
            alignment_percent: a,
            mae: a / 10.0,
            wallclock_ns: 0,
        }
    }

    #[test]
    fn three_rows() {
        let s = summarize(&[row(0, 50.0), row(1, 60.0), row(2, 70.0)]).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].mean_alignment - 60.0).abs() < 1e-12);
        assert!((s[0].stderr_alignment - 5.773502691896258).abs() < 1e-9);
        assert_eq!(s[0].n, 3);
    }

    #[test]
    fn single_row_has_zero_stderr() {
        let s = summarize(&[row(0, 42.0)]).unwrap();
        assert_eq!(s[0].stderr_alignment, 0.0);
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn order_independent() {
        let a = summarize(&[row(0, 50.0), row(1, 61.0), row(2, 70.3)]).unwrap();
        let b = summarize(&[row(2, 70.3), row(0, 50.0), row(1, 61.0)]).unwrap();
        assert_eq!(a, b);
    }
}
