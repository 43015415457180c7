use std::io::Write;

use super::GradEstimate;
use crate::error::Result;
use crate::network::{Group, Layout};

/// Long-format CSV: `param_index,group,estimator,value`. Readout entries,
/// when present, follow θ with indices continuing past `theta_len`.
pub fn write_grad_dump<W: Write>(out: W, layout: &Layout, estimates: &[(&str, &GradEstimate)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["param_index", "group", "estimator", "value"])?;
    for (name, est) in estimates {
        let readout = est.readout.as_deref().unwrap_or(&[]);
        for (p, v) in est.theta.iter().chain(readout).enumerate() {
            let group = match layout.group_of(p) {
                Group::Column(i) => i.to_string(),
                Group::Readout => "readout".to_string(),
            };
            wtr.write_record([p.to_string(), group, name.to_string(), format!("{v:e}")])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
