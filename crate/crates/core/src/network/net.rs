use super::cell::{cell_forward_additive, cell_forward_gru, cell_forward_static, CellCache, CellParams};
use super::column::{column_forward_into, ColumnParams};
use super::{sample_mask, CellKind, Group, LateralMask, Layout, NetConfig};
use crate::error::{check_len, Error, Result};
use crate::numkit::{dot, fill_uniform, xavier_bound, RngStream};

/// Input/target pairs of one online episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl Sequence {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        check_len("targets", inputs.len(), targets.len())?;
        if let Some(d) = inputs.first().map(Vec::len) {
            if inputs.iter().any(|x| x.len() != d) {
                return Err(Error::InvalidArgument("ragged input sequence".into()));
            }
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn truncated(&self, len: usize) -> Sequence {
        Sequence {
            inputs: self.inputs[..len].to_vec(),
            targets: self.targets[..len].to_vec(),
        }
    }
}

/// Everything one forward step produced; enough to replay any backward
/// pass through that step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    /// Layer pre-activations and features of all columns, `C·W` each.
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub f: Vec<f64>,
    pub cell: CellCache,
    pub h: Vec<f64>,
    /// Readout weights used for this step's prediction.
    pub w: Vec<f64>,
    pub y: f64,
    pub target: f64,
    pub delta: f64,
}

impl StepRecord {
    pub fn set_target(&mut self, target: f64) {
        self.target = target;
        self.delta = target - self.y;
    }

    pub fn loss(&self) -> f64 {
        0.5 * self.delta * self.delta
    }
}

/// Append-only sequence of step records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepTape {
    records: Vec<StepRecord>,
}

impl StepTape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: StepRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn get(&self, t: usize) -> Option<&StepRecord> {
        self.records.get(t)
    }

    pub fn total_loss(&self) -> f64 {
        self.records.iter().map(StepRecord::loss).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnarNetwork {
    config: NetConfig,
    layout: Layout,
    params: Vec<f64>,
    mask: LateralMask,
    seed: u64,
    stream: u64,
}

/// Glorot-uniform weights, zero biases, readout Glorot over (1, C), and a
/// lateral mask sampled once. Weights and mask come from separate forks of
/// `rng`, so networks differing only in lateral ratio share their weights.
pub fn build_network(cfg: &NetConfig, rng: &RngStream) -> Result<ColumnarNetwork> {
    cfg.validate()?;
    let layout = Layout::new(cfg);
    let mut weights = rng.fork(0);
    let mask = sample_mask(cfg, &mut rng.fork(1))?;
    let (c, w, d) = (cfg.columns, cfg.width, cfg.input_dim);
    let mut params = vec![0.0; layout.total_len()];
    for i in 0..c {
        let group = &mut params[layout.group_range(i)];
        fill_uniform(&mut group[layout.w1()], xavier_bound(w, d + 1), &mut weights);
        fill_uniform(&mut group[layout.w2()], xavier_bound(w, w), &mut weights);
        for &g in layout.gate_list() {
            fill_uniform(&mut group[layout.u_row(g)], xavier_bound(c, c * w), &mut weights);
            fill_uniform(&mut group[layout.r_row(g)], xavier_bound(c, c), &mut weights);
        }
    }
    fill_uniform(&mut params[layout.readout_range()], xavier_bound(1, c), &mut weights);
    Ok(ColumnarNetwork {
        config: cfg.clone(),
        layout,
        params,
        mask,
        seed: rng.seed(),
        stream: rng.stream_id(),
    })
}

/// `y = Σ_i w_i·h_i`
pub fn predict(w: &[f64], h: &[f64]) -> Result<f64> {
    check_len("readout weights", h.len(), w.len())?;
    Ok(dot(w, h))
}

impl ColumnarNetwork {
    pub(crate) fn from_parts(config: NetConfig, params: Vec<f64>, mask: LateralMask, seed: u64, stream: u64) -> Result<Self> {
        config.validate()?;
        let layout = Layout::new(&config);
        check_len("parameter buffer", layout.total_len(), params.len())?;
        check_len("mask columns", config.columns, mask.columns())?;
        check_len("mask width", config.width, mask.width())?;
        Ok(Self {
            config,
            layout,
            params,
            mask,
            seed,
            stream,
        })
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn mask(&self) -> &LateralMask {
        &self.mask
    }

    /// Seed and stream id of the generator the network was built from.
    pub fn origin(&self) -> (u64, u64) {
        (self.seed, self.stream)
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn theta(&self) -> &[f64] {
        &self.params[..self.layout.theta_len()]
    }

    pub fn readout(&self) -> &[f64] {
        &self.params[self.layout.readout_range()]
    }

    pub fn readout_mut(&mut self) -> &mut [f64] {
        let r = self.layout.readout_range();
        &mut self.params[r]
    }

    pub fn group_of(&self, index: usize) -> Group {
        self.layout.group_of(index)
    }

    pub fn column(&self, i: usize) -> ColumnParams<'_> {
        let l = &self.layout;
        let block = &self.params[l.group_range(i)][l.extractor()];
        ColumnParams::from_block(l.width, l.input_dim, block).expect("layout-consistent block")
    }

    pub fn cell(&self) -> CellParams<'_> {
        CellParams::new(&self.layout, &self.params).expect("layout-consistent buffer")
    }

    /// Value fed to column `i`'s state slot: the previous own state for
    /// recurrent cells, zero for the static cell.
    pub(crate) fn column_slot(&self, h_prev: &[f64], i: usize) -> f64 {
        if self.config.cell.is_recurrent() {
            h_prev[i]
        } else {
            0.0
        }
    }

    /// One forward step with explicit readout weights `w`. The returned
    /// record has no target yet (`delta = −y`).
    pub fn step_with_readout(&self, x: &[f64], h_prev: &[f64], w: &[f64]) -> Result<StepRecord> {
        let l = &self.layout;
        check_len("input", l.input_dim, x.len())?;
        check_len("previous state", l.columns, h_prev.len())?;
        let cw = l.columns * l.width;
        let (mut a1, mut a2, mut f) = (vec![0.0; cw], vec![0.0; cw], vec![0.0; cw]);
        for i in 0..l.columns {
            let s = i * l.width..(i + 1) * l.width;
            column_forward_into(
                &self.column(i),
                x,
                self.column_slot(h_prev, i),
                &mut a1[s.clone()],
                &mut a2[s.clone()],
                &mut f[s],
            );
        }
        let cell = self.cell();
        let (h, cache) = match self.config.cell {
            CellKind::AdditiveTanh => cell_forward_additive(&cell, &self.mask, &f, h_prev)?,
            CellKind::Static => cell_forward_static(&cell, &self.mask, &f)?,
            CellKind::GruColumn => cell_forward_gru(&cell, &self.mask, &f, h_prev)?,
        };
        let y = predict(w, &h)?;
        Ok(StepRecord {
            x: x.to_vec(),
            h_prev: h_prev.to_vec(),
            a1,
            a2,
            f,
            cell: cache,
            h,
            w: w.to_vec(),
            y,
            target: 0.0,
            delta: -y,
        })
    }

    /// Columns, then cell, then readout with the network's own `w`.
    pub fn rnn_step(&self, x: &[f64], h_prev: &[f64]) -> Result<StepRecord> {
        self.step_with_readout(x, h_prev, self.readout())
    }

    /// Runs a whole sequence from `h(0) = 0` with the readout frozen.
    pub fn run(&self, seq: &Sequence) -> Result<StepTape> {
        let mut tape = StepTape::new();
        let mut h = vec![0.0; self.config.columns];
        for (x, &target) in seq.inputs.iter().zip(&seq.targets) {
            let mut rec = self.rnn_step(x, &h)?;
            rec.set_target(target);
            h = rec.h.clone();
            tape.push(rec);
        }
        Ok(tape)
    }

    pub fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        check_len("parameter buffer", self.layout.total_len(), params.len())?;
        Ok(Self {
            params,
            ..self.clone()
        })
    }
}
