use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    /// `h_i ← h_i + tanh(U_i·f + R_i·h)`: never decays the old state.
    #[serde(rename = "additive")]
    AdditiveTanh,
    /// `h_i ← tanh(U_i·f)`, and columns see no previous state.
    Static,
    /// Scalar-state GRU per column.
    #[serde(rename = "gru")]
    GruColumn,
}

impl CellKind {
    pub fn name(self) -> &'static str {
        match self {
            CellKind::AdditiveTanh => "additive",
            CellKind::Static => "static",
            CellKind::GruColumn => "gru",
        }
    }

    pub fn is_recurrent(self) -> bool {
        !matches!(self, CellKind::Static)
    }

    /// Number of (U-row, R-row) blocks per column.
    pub fn gate_blocks(self) -> usize {
        match self {
            CellKind::GruColumn => 3,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CellKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CellKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" => Ok(CellKind::AdditiveTanh),
            "static" => Ok(CellKind::Static),
            "gru" => Ok(CellKind::GruColumn),
            other => Err(Error::InvalidArgument(format!("unknown cell kind '{other}'"))),
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetConfig {
    pub columns: usize,
    pub width: usize,
    pub input_dim: usize,
    pub cell: CellKind,
    /// Lateral-to-own connection ratio, in percent.
    pub lateral_ratio: f64,
    /// Also mask off-diagonal state-to-state weights `R_ij`.
    #[serde(default = "default_true")]
    pub mask_r: bool,
}

impl NetConfig {
    pub fn new(columns: usize, width: usize, input_dim: usize, cell: CellKind, lateral_ratio: f64) -> Self {
        Self {
            columns,
            width,
            input_dim,
            cell,
            lateral_ratio,
            mask_r: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.columns == 0 {
            return Err(Error::InvalidArgument("columns must be >= 1".into()));
        }
        if self.width == 0 {
            return Err(Error::InvalidArgument("width must be >= 1".into()));
        }
        if self.input_dim == 0 {
            return Err(Error::InvalidArgument("input_dim must be >= 1".into()));
        }
        if !(self.lateral_ratio >= 0.0 && self.lateral_ratio.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lateral ratio must be a finite non-negative percent, got {}",
                self.lateral_ratio
            )));
        }
        Ok(())
    }
}
