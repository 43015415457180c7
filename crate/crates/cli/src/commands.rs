use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use colnet::bench::{
    feasible_ratios, read_decay, read_summary, run_decay, run_experiment, summarize, write_decay, write_rows,
    write_summary, AlignmentRow, Experiment, ExperimentConfig,
};

use crate::args::{Cli, Command, CommonArgs, PlotArgs, PlotKind, SelfcheckArgs};
use crate::{resolve, selfcheck, svg, CliError};

pub fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::AlignRnn(a) => experiment(Experiment::AlignRnn, &a),
        Command::AlignMeta(a) => experiment(Experiment::AlignMeta, &a),
        Command::MetaAblation(a) => experiment(Experiment::MetaAblation, &a),
        Command::StepsizeSweep(a) => experiment(Experiment::StepSizeSweep, &a),
        Command::Sweep(a) => {
            let cfgs = resolve::sweep_configs(&a)?;
            with_pool(&a.common, || run_and_write(&cfgs, &a.common.out_dir, "sweep"))
        }
        Command::Decay(a) => {
            let cfg = resolve::decay_config(&a)?;
            with_pool(&a.common, || {
                let rows = run_decay(&cfg)?;
                create_dir(&a.common.out_dir)?;
                let path = a.common.out_dir.join("decay.csv");
                write_decay(BufWriter::new(File::create(&path)?), &rows)?;
                eprintln!("wrote {}", path.display());
                Ok(0)
            })
        }
        Command::Selfcheck(a) => run_selfcheck(&a),
        Command::Plot(a) => plot(&a),
    }
}

fn experiment(e: Experiment, a: &crate::args::ExperimentArgs) -> Result<i32, CliError> {
    let cfg = resolve::experiment_config(e, a)?;
    with_pool(&a.common, || run_and_write(std::slice::from_ref(&cfg), &a.common.out_dir, e.name()))
}

fn with_pool<T>(common: &CommonArgs, f: impl FnOnce() -> Result<T, CliError> + Send) -> Result<T, CliError>
where
    T: Send,
{
    match common.workers {
        None => f(),
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Failure(e.to_string()))?
            .install(f),
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Failure(format!("cannot create {}: {e}", dir.display())))
}

fn run_and_write(cfgs: &[ExperimentConfig], out_dir: &Path, stem: &str) -> Result<i32, CliError> {
    let mut rows: Vec<AlignmentRow> = Vec::new();
    for (k, cfg) in cfgs.iter().enumerate() {
        let (_, skipped) = feasible_ratios(cfg);
        for s in skipped {
            eprintln!(
                "warning: {}: skipping s={s}%, not enough lateral slots for C={} W={}",
                cfg.config_id(),
                cfg.net.columns,
                cfg.net.width
            );
        }
        eprintln!("[{}/{}] {} ({} seeds)", k + 1, cfgs.len(), cfg.config_id(), cfg.seeds);
        rows.extend(run_experiment(cfg)?);
    }
    if rows.is_empty() {
        return Err(CliError::Failure("no feasible configuration produced rows".into()));
    }
    create_dir(out_dir)?;
    let rows_path = out_dir.join(format!("{stem}_rows.csv"));
    let summary_path = out_dir.join(format!("{stem}_summary.csv"));
    write_rows(BufWriter::new(File::create(&rows_path)?), &rows)?;
    write_summary(BufWriter::new(File::create(&summary_path)?), &summarize(&rows)?)?;
    eprintln!("wrote {} and {}", rows_path.display(), summary_path.display());
    Ok(0)
}

fn run_selfcheck(a: &SelfcheckArgs) -> Result<i32, CliError> {
    let report = selfcheck::selfcheck();
    create_dir(&a.out_dir)?;
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    fs::write(a.out_dir.join("selfcheck.json"), format!("{json}\n"))?;
    if a.json {
        println!("{json}");
    }
    let failed: Vec<_> = report.iter().filter(|c| !c.passed()).collect();
    for c in &report {
        eprintln!(
            "{:<34} {:<4} max dev {:.3e} (tolerance {:.0e})",
            c.property, c.status, c.max_abs_dev, c.tolerance
        );
    }
    if failed.is_empty() {
        Ok(0)
    } else {
        for c in failed {
            eprintln!("FAILED: {} (max dev {:.3e})", c.property, c.max_abs_dev);
        }
        Ok(1)
    }
}

fn plot(a: &PlotArgs) -> Result<i32, CliError> {
    let file = File::open(&a.input).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", a.input.display())))?;
    let doc = match a.kind {
        PlotKind::DecayCurve => svg::decay_curve(&read_decay(file)?)?,
        PlotKind::AlignmentVsS => svg::alignment_vs_s(&read_summary(file)?)?,
        PlotKind::StepsizePanel => svg::stepsize_panel(&read_summary(file)?)?,
    };
    create_dir(&a.out_dir)?;
    let stem = a.input.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let kind = match a.kind {
        PlotKind::AlignmentVsS => "alignment_vs_s",
        PlotKind::DecayCurve => "decay_curve",
        PlotKind::StepsizePanel => "stepsize_panel",
    };
    let path = a.out_dir.join(format!("{stem}_{kind}.svg"));
    fs::write(&path, doc)?;
    eprintln!("wrote {}", path.display());
    Ok(0)
}
