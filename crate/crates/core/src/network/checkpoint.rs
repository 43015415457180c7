//! Bit-exact network checkpoints: the parameter buffer as little-endian
//! f64 (`<name>.bin`) plus a JSON sidecar (`<name>.json`) carrying the
//! configuration, mask indices and generator origin.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ColumnarNetwork, LateralMask, NetConfig};
use crate::error::{Error, Result};

const FORMAT: &str = "colnet-checkpoint-v1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    format: String,
    config: NetConfig,
    seed: u64,
    stream: u64,
    param_count: usize,
    u_active: Vec<Vec<usize>>,
    r_active: Vec<Vec<usize>>,
}

fn paths(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{name}.bin")), dir.join(format!("{name}.json")))
}

pub fn save(net: &ColumnarNetwork, dir: &Path, name: &str) -> Result<()> {
    let (bin, json) = paths(dir, name);
    let mut bytes = Vec::with_capacity(net.params().len() * 8);
    for v in net.params() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(bin, bytes)?;
    let (seed, stream) = net.origin();
    let sidecar = Sidecar {
        format: FORMAT.to_string(),
        config: net.config().clone(),
        seed,
        stream,
        param_count: net.params().len(),
        u_active: net.mask().u_active_rows().to_vec(),
        r_active: net.mask().r_active_rows().to_vec(),
    };
    fs::write(json, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

pub fn load(dir: &Path, name: &str) -> Result<ColumnarNetwork> {
    let (bin, json) = paths(dir, name);
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(json)?)?;
    if sidecar.format != FORMAT {
        return Err(Error::InvalidArgument(format!("unsupported checkpoint format '{}'", sidecar.format)));
    }
    let bytes = fs::read(bin)?;
    if bytes.len() != sidecar.param_count * 8 {
        return Err(Error::InvalidArgument(format!(
            "checkpoint holds {} bytes, expected {}",
            bytes.len(),
            sidecar.param_count * 8
        )));
    }
    let params = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect();
    let mask = LateralMask::from_indices(sidecar.config.columns, sidecar.config.width, sidecar.u_active, sidecar.r_active)?;
    ColumnarNetwork::from_parts(sidecar.config, params, mask, sidecar.seed, sidecar.stream)
}
