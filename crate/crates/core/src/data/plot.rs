//! Minimal standalone SVG line charts.

use std::fmt::Write as _;
use std::path::Path;

use super::TimeSeries;
use crate::error::{Error, Result};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 45.0;
const MAX_POINTS: usize = 4000;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

/// Tick positions at a 1/2/5 × 10ⁿ spacing covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / target.max(1) as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    let ticks = (first..=last).map(|i| i as f64 * step).collect();
    (ticks, decimals)
}

/// Keeps the min and max of each bucket so long traces stay legible.
fn decimate(series: &TimeSeries) -> Vec<(f64, f64)> {
    let n = series.len();
    if n <= MAX_POINTS {
        return (0..n).map(|k| (series.time(k), series.values[k])).collect();
    }
    let buckets = MAX_POINTS / 2;
    let mut out = Vec::with_capacity(MAX_POINTS);
    for b in 0..buckets {
        let lo = b * n / buckets;
        let hi = ((b + 1) * n / buckets).max(lo + 1);
        let (mut imin, mut imax) = (lo, lo);
        for k in lo..hi {
            if series.values[k] < series.values[imin] {
                imin = k;
            }
            if series.values[k] > series.values[imax] {
                imax = k;
            }
        }
        let (a, b) = if imin <= imax {
            (imin, imax)
        } else {
            (imax, imin)
        };
        out.push((series.time(a), series.values[a]));
        if b != a {
            out.push((series.time(b), series.values[b]));
        }
    }
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders one polyline per series with axis ticks and a legend. The
/// x axis is the series time in seconds.
pub fn render_svg(series: &[TimeSeries], labels: &[&str]) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.is_empty()) {
        return Err(Error::InvalidArgument("nothing to plot".into()));
    }
    if labels.len() != series.len() {
        return Err(Error::LengthMismatch {
            left: series.len(),
            right: labels.len(),
        });
    }

    let x_min = series.iter().map(|s| s.start).fold(f64::INFINITY, f64::min);
    let mut x_max = series
        .iter()
        .map(|s| s.time(s.len() - 1))
        .fold(f64::NEG_INFINITY, f64::max);
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    let mut y_min = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let mut y_max = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    let pad = if y_max > y_min {
        0.05 * (y_max - y_min)
    } else {
        y_min.abs().max(1.0) * 0.1
    };
    y_min -= pad;
    y_max += pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h;
    let bottom = MARGIN_TOP + plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{:.2}" y2="{bottom}" stroke="black"/>"#,
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}" stroke="black"/>"#
    );

    let (xticks, xdec) = nice_ticks(x_min, x_max, 8);
    for t in xticks {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t:.xdec$}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        );
    }
    let (yticks, ydec) = nice_ticks(y_min, y_max, 6);
    for t in yticks {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/><text x="{:.2}" y="{:.2}" text-anchor="end">{t:.ydec$}</text>"##,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">time (s)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    );

    for (i, (s, label)) in series.iter().zip(labels).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (j, (t, v)) in decimate(s).into_iter().enumerate() {
            if j > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", sx(t), sy(v));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{points}"/>"#
        );
        let ly = MARGIN_TOP + 12.0 + 18.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot_svg(series: &[TimeSeries], labels: &[&str], path: &Path) -> Result<()> {
    let svg = render_svg(series, labels)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
