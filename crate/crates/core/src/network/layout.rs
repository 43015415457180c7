use std::ops::Range;

use super::{CellKind, Gate, NetConfig};

/// Which parameter group owns a scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Column(usize),
    Readout,
}

/// Offsets of every parameter block in the flat buffer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub columns: usize,
    pub width: usize,
    pub input_dim: usize,
    pub cell: CellKind,
    group_len: usize,
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    gates: [usize; 3],
}

impl Layout {
    pub fn new(cfg: &NetConfig) -> Self {
        let (c, w, d) = (cfg.columns, cfg.width, cfg.input_dim);
        let w1 = 0;
        let b1 = w1 + w * (d + 1);
        let w2 = b1 + w;
        let b2 = w2 + w * w;
        let cell_start = b2 + w;
        let block = c * w + c;
        let mut gates = [usize::MAX; 3];
        for (g, slot) in gates.iter_mut().enumerate().take(cfg.cell.gate_blocks()) {
            *slot = cell_start + g * block;
        }
        let group_len = cell_start + cfg.cell.gate_blocks() * block;
        Self {
            columns: c,
            width: w,
            input_dim: d,
            cell: cfg.cell,
            group_len,
            w1,
            b1,
            w2,
            b2,
            gates,
        }
    }

    /// |θ_i|, identical for every column.
    pub fn group_len(&self) -> usize {
        self.group_len
    }

    /// Number of recurrent-network parameters, readout excluded.
    pub fn theta_len(&self) -> usize {
        self.columns * self.group_len
    }

    pub fn total_len(&self) -> usize {
        self.theta_len() + self.columns
    }

    pub fn group_range(&self, i: usize) -> Range<usize> {
        i * self.group_len..(i + 1) * self.group_len
    }

    pub fn readout_range(&self) -> Range<usize> {
        self.theta_len()..self.total_len()
    }

    pub fn group_of(&self, index: usize) -> Group {
        assert!(index < self.total_len(), "parameter index out of range");
        if index >= self.theta_len() {
            Group::Readout
        } else {
            Group::Column(index / self.group_len)
        }
    }

    // Offsets relative to the start of a column group.

    pub fn w1(&self) -> Range<usize> {
        self.w1..self.b1
    }

    pub fn b1(&self) -> Range<usize> {
        self.b1..self.w2
    }

    pub fn w2(&self) -> Range<usize> {
        self.w2..self.b2
    }

    pub fn b2(&self) -> Range<usize> {
        self.b2..self.b2 + self.width
    }

    pub fn extractor(&self) -> Range<usize> {
        self.w1..self.b2 + self.width
    }

    pub fn u_row(&self, gate: Gate) -> Range<usize> {
        let start = self.gate_start(gate);
        start..start + self.columns * self.width
    }

    pub fn r_row(&self, gate: Gate) -> Range<usize> {
        let start = self.gate_start(gate) + self.columns * self.width;
        start..start + self.columns
    }

    fn gate_start(&self, gate: Gate) -> usize {
        let s = self.gates[gate as usize];
        assert!(s != usize::MAX, "{gate:?} gate absent for {} cell", self.cell);
        s
    }

    pub fn gate_list(&self) -> &'static [Gate] {
        match self.cell {
            CellKind::GruColumn => &[Gate::Candidate, Gate::Update, Gate::Reset],
            _ => &[Gate::Candidate],
        }
    }
}
