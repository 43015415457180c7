//! Deterministic SVG 1.1 rendering of summary and decay CSVs.

use std::fmt::Write;

use colnet::bench::{DecayRow, SummaryRow};

use crate::CliError;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];
const PANEL_W: f64 = 520.0;
const PLOT_X: f64 = 70.0;
const PLOT_Y: f64 = 40.0;
const PLOT_W: f64 = 420.0;
const PLOT_H: f64 = 260.0;
const LEGEND_Y: f64 = 345.0;
const LEGEND_LINE: f64 = 16.0;

#[derive(Debug, Clone, Default)]
struct Series {
    label: String,
    /// (x, y, stderr)
    points: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone)]
struct Panel {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<Series>,
}

fn series_mut<'a>(series: &'a mut Vec<Series>, label: &str) -> &'a mut Series {
    match series.iter().position(|s| s.label == label) {
        Some(i) => &mut series[i],
        None => {
            series.push(Series {
                label: label.to_string(),
                points: Vec::new(),
            });
            series.last_mut().unwrap()
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn tick_label(v: f64) -> String {
    let s = if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    };
    if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn panel_height(p: &Panel) -> f64 {
    LEGEND_Y + LEGEND_LINE * p.series.len() as f64 + 10.0
}

fn render_panel(out: &mut String, p: &Panel, dx: f64) {
    let pts = || p.series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = range(pts().map(|q| q.0));
    let (y0, y1) = range(pts().flat_map(|q| [q.1 - q.2, q.1 + q.2]));
    let sx = |x: f64| dx + PLOT_X + (x - x0) / (x1 - x0) * PLOT_W;
    let sy = |y: f64| PLOT_Y + PLOT_H - (y - y0) / (y1 - y0) * PLOT_H;

    let _ = writeln!(out, "<g class=\"panel\">");
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        num(dx + PLOT_X + PLOT_W / 2.0),
        escape(&p.title)
    );
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000\"/>",
        num(dx + PLOT_X),
        num(PLOT_Y),
        num(PLOT_W),
        num(PLOT_H)
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            out,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000\"/><text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\" font-size=\"10\">{4}</text>",
            num(px),
            num(PLOT_Y + PLOT_H),
            num(PLOT_Y + PLOT_H + 4.0),
            num(PLOT_Y + PLOT_H + 16.0),
            tick_label(xv)
        );
        let _ = writeln!(
            out,
            "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#000\"/><text x=\"{3}\" y=\"{4}\" text-anchor=\"end\" font-size=\"10\">{5}</text>",
            num(dx + PLOT_X - 4.0),
            num(dx + PLOT_X),
            num(py),
            num(dx + PLOT_X - 6.0),
            num(py + 3.0),
            tick_label(yv)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        num(dx + PLOT_X + PLOT_W / 2.0),
        num(PLOT_Y + PLOT_H + 34.0),
        escape(&p.x_label)
    );
    let (lx, ly) = (dx + 16.0, PLOT_Y + PLOT_H / 2.0);
    let _ = writeln!(
        out,
        "<text x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 {0} {1})\">{2}</text>",
        num(lx),
        num(ly),
        escape(&p.y_label)
    );

    for (k, s) in p.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(out, "<g class=\"series\" stroke=\"{color}\" fill=\"{color}\">");
        if s.points.len() > 1 {
            let upper = s.points.iter().map(|q| format!("{},{}", num(sx(q.0)), num(sy(q.1 + q.2))));
            let lower = s.points.iter().rev().map(|q| format!("{},{}", num(sx(q.0)), num(sy(q.1 - q.2))));
            let poly: Vec<String> = upper.chain(lower).collect();
            let _ = writeln!(
                out,
                "<polygon class=\"band\" points=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>",
                poly.join(" ")
            );
            let line: Vec<String> = s.points.iter().map(|q| format!("{},{}", num(sx(q.0)), num(sy(q.1)))).collect();
            let _ = writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke-width=\"1.5\"/>", line.join(" "));
        }
        for q in &s.points {
            let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"3\"/>", num(sx(q.0)), num(sy(q.1)));
        }
        let y = LEGEND_Y + LEGEND_LINE * k as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\"/><text x=\"{}\" y=\"{}\" font-size=\"11\" stroke=\"none\" fill=\"#000\">{}</text>",
            num(dx + PLOT_X),
            num(y - 9.0),
            num(dx + PLOT_X + 16.0),
            num(y),
            escape(&s.label)
        );
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</g>");
}

fn document(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len() as f64;
    let height = panels.iter().map(panel_height).fold(0.0, f64::max);
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\">",
        num(width),
        num(height)
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>");
    for (k, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, PANEL_W * k as f64);
    }
    let _ = writeln!(out, "</svg>");
    out
}

fn finite_err(e: f64) -> f64 {
    if e.is_finite() {
        e
    } else {
        0.0
    }
}

fn push_summary(series: &mut Vec<Series>, label: &str, r: &SummaryRow) {
    if r.mean_alignment.is_finite() {
        series_mut(series, label)
            .points
            .push(((1.0 + r.s_percent).log10(), r.mean_alignment, finite_err(r.stderr_alignment)));
    }
}

fn sort_points(panels: &mut [Panel]) {
    for s in panels.iter_mut().flat_map(|p| p.series.iter_mut()) {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
}

fn empty(what: &str) -> CliError {
    CliError::Failure(format!("{what} has no rows to plot"))
}

/// Mean alignment against `log10(1 + s)`, one series per configuration and
/// estimator, with standard-error bands.
pub fn alignment_vs_s(rows: &[SummaryRow]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(empty("summary"));
    }
    let multi = rows.iter().any(|r| r.config_id != rows[0].config_id);
    let mut series = Vec::new();
    for r in rows {
        let label = if multi {
            format!("{} {}", r.config_id, r.estimator)
        } else {
            r.estimator.clone()
        };
        push_summary(&mut series, &label, r);
    }
    let title = if multi { "alignment".to_string() } else { rows[0].config_id.clone() };
    let mut panels = [Panel {
        title,
        x_label: "log10(1 + s%)".into(),
        y_label: "alignment (%)".into(),
        series,
    }];
    sort_points(&mut panels);
    Ok(document(&panels))
}

/// One alignment-vs-s panel per readout step size.
pub fn stepsize_panel(rows: &[SummaryRow]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(empty("summary"));
    }
    let mut panels: Vec<(u64, Panel)> = Vec::new();
    for r in rows {
        let key = r.step_size.to_bits();
        let k = match panels.iter().position(|(b, _)| *b == key) {
            Some(k) => k,
            None => {
                panels.push((
                    key,
                    Panel {
                        title: format!("step size {}", r.step_size),
                        x_label: "log10(1 + s%)".into(),
                        y_label: "alignment (%)".into(),
                        series: Vec::new(),
                    },
                ));
                panels.len() - 1
            }
        };
        push_summary(&mut panels[k].1.series, &r.estimator, r);
    }
    panels.sort_by(|a, b| f64::from_bits(b.0).total_cmp(&f64::from_bits(a.0)));
    let mut panels: Vec<Panel> = panels.into_iter().map(|(_, p)| p).collect();
    sort_points(&mut panels);
    Ok(document(&panels))
}

/// Mean absolute state against step, one panel per cell type.
pub fn decay_curve(rows: &[DecayRow]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(empty("decay table"));
    }
    let mut panels: Vec<Panel> = Vec::new();
    for r in rows {
        let k = match panels.iter().position(|p| p.title == r.cell) {
            Some(k) => k,
            None => {
                panels.push(Panel {
                    title: r.cell.clone(),
                    x_label: "step".into(),
                    y_label: "mean |state|".into(),
                    series: Vec::new(),
                });
                panels.len() - 1
            }
        };
        let label = if r.bias { "bias" } else { "no bias" };
        if r.mean_abs_state.is_finite() {
            series_mut(&mut panels[k].series, label)
                .points
                .push((r.step as f64, r.mean_abs_state, finite_err(r.stderr)));
        }
    }
    sort_points(&mut panels);
    Ok(document(&panels))
}
