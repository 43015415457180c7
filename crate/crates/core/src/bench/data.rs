use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Sequence;
use crate::numkit::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub length: usize,
    pub input_dim: usize,
}

impl Default for SequenceSpec {
    fn default() -> Self {
        Self {
            length: 50,
            input_dim: 50,
        }
    }
}

impl SequenceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 || self.input_dim == 0 {
            return Err(Error::InvalidArgument("sequence length and input size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Binary inputs with independent fair bits, targets uniform on (−50, 50).
pub fn gen_sequence(spec: &SequenceSpec, rng: &mut RngStream) -> Result<Sequence> {
    spec.validate()?;
    let mut inputs = Vec::with_capacity(spec.length);
    let mut targets = Vec::with_capacity(spec.length);
    for _ in 0..spec.length {
        inputs.push((0..spec.input_dim).map(|_| if rng.coin() { 1.0 } else { 0.0 }).collect());
        targets.push(rng.uniform(-50.0, 50.0));
    }
    Sequence::new(inputs, targets)
}
