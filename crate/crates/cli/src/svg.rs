//! Minimal static SVG line charts with log-log axes, for convergence and
//! growth curves.  Output is deterministic: fixed canvas, fixed decimal
//! formatting of coordinates.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn fmt(x: f64) -> String {
    format!("{x:.2}")
}

/// One labelled polyline of strictly positive (x, y) points.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Dashed reference lines (e.g. theoretical slopes) vs solid data.
    pub dashed: bool,
}

/// Render a log-log chart; points with non-positive coordinates are
/// dropped (they have no place on log axes).
pub fn log_log_chart(
    dir: &Path,
    name: &str,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> anyhow::Result<PathBuf> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .collect();
    anyhow::ensure!(!pts.is_empty(), "chart {name} has no positive data");
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in &pts {
        let (lx, ly) = (x.log10(), y.log10());
        x0 = x0.min(lx);
        x1 = x1.max(lx);
        y0 = y0.min(ly);
        y1 = y1.max(ly);
    }
    // Avoid a degenerate viewport when a curve is flat.
    if x1 - x0 < 1e-9 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-9 {
        y1 = y0 + 1.0;
    }
    let sx = |lx: f64| MARGIN + (lx - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |ly: f64| H - MARGIN - (ly - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"monospace\" font-size=\"12\">"
    )
    .unwrap();
    writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>").unwrap();
    writeln!(out, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\">{title}</text>", W / 2.0)
        .unwrap();

    // Decade grid lines with tick labels.
    for d in (x0.floor() as i64)..=(x1.ceil() as i64) {
        let lx = d as f64;
        if lx < x0 - 1e-9 || lx > x1 + 1e-9 {
            continue;
        }
        let x = sx(lx);
        writeln!(
            out,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#ddd\"/>",
            fmt(x),
            fmt(MARGIN),
            fmt(H - MARGIN)
        )
        .unwrap();
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">1e{d}</text>",
            fmt(x),
            fmt(H - MARGIN + 18.0)
        )
        .unwrap();
    }
    for d in (y0.floor() as i64)..=(y1.ceil() as i64) {
        let ly = d as f64;
        if ly < y0 - 1e-9 || ly > y1 + 1e-9 {
            continue;
        }
        let y = sy(ly);
        writeln!(
            out,
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#ddd\"/>",
            fmt(y),
            fmt(MARGIN),
            fmt(W - MARGIN)
        )
        .unwrap();
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">1e{d}</text>",
            fmt(MARGIN - 6.0),
            fmt(y + 4.0)
        )
        .unwrap();
    }
    // Axes frame and labels.
    writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        fmt(MARGIN),
        fmt(MARGIN),
        fmt(W - 2.0 * MARGIN),
        fmt(H - 2.0 * MARGIN)
    )
    .unwrap();
    writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
        W / 2.0,
        H - 12.0
    )
    .unwrap();
    writeln!(
        out,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{y_label}</text>",
        H / 2.0,
        H / 2.0
    )
    .unwrap();

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|(x, y)| format!("{},{}", fmt(sx(x.log10())), fmt(sy(y.log10()))))
            .collect();
        if coords.is_empty() {
            continue;
        }
        let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>",
            coords.join(" ")
        )
        .unwrap();
        for c in &coords {
            let mut it = c.split(',');
            let (x, y) = (it.next().unwrap(), it.next().unwrap());
            if !s.dashed {
                writeln!(out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"2.5\" fill=\"{color}\"/>")
                    .unwrap();
            }
        }
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>",
            fmt(MARGIN + 8.0),
            fmt(MARGIN + 16.0 + 16.0 * i as f64),
            s.label
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();

    let path = dir.join(name);
    fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
