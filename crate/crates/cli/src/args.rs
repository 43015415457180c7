use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use colnet::network::CellKind;

#[derive(Debug, Parser)]
#[command(name = "colnet", version, about = "Gradient-alignment experiments for columnar recurrent networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recurrent alignment against full BPTT, frozen readout.
    AlignRnn(ExperimentArgs),
    /// Meta-gradient alignment through the LMS readout, static cell.
    AlignMeta(ExperimentArgs),
    /// Full versus ablated meta credit, additive cell.
    MetaAblation(ExperimentArgs),
    /// Meta alignment across several readout step sizes.
    StepsizeSweep(ExperimentArgs),
    /// State decay of randomly initialized LSTM and GRU cells.
    Decay(DecayArgs),
    /// The C x W (x SS) architecture grid, or one configuration file.
    Sweep(ExperimentArgs),
    /// Oracle-equivalence checks; writes selfcheck.json.
    Selfcheck(SelfcheckArgs),
    /// Renders a summary or decay CSV to SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of seeds per configuration.
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub columns: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    /// Sequence length T.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub input_dim: Option<usize>,
    /// Lateral ratios in percent, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub s_list: Option<Vec<f64>>,
    /// T-BPTT truncation windows, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub windows: Option<Vec<usize>>,
    /// Readout LMS step size (step-size sweep: comma separated list).
    #[arg(long, value_delimiter = ',')]
    pub step_size: Option<Vec<f64>>,
    #[arg(long)]
    pub cell: Option<CellKind>,
    /// Mask off-diagonal state-to-state weights too.
    #[arg(long)]
    pub mask_r: Option<bool>,
    /// Record per-estimator wall-clock time (rows are then not reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DecayArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SelfcheckArgs {
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
    /// Also print the report to stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    AlignmentVsS,
    DecayCurve,
    StepsizePanel,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Summary CSV (or decay CSV for decay-curve).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "alignment-vs-s")]
    pub kind: PlotKind,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
}
