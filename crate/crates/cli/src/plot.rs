//! SVG renderings of report series: fixed canvas, fixed tick count, fixed
//! float formats, no timestamps, so equal report bytes always produce equal
//! image bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Result;
use sectorlab::report::{RunReport, Series};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 48.0;
const TICKS: usize = 5;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1e5 || a < 1e-3 {
        format!("{v:.2e}")
    } else {
        format!("{v:.4}")
    }
}

/// File-name slug: lowercase alphanumerics joined by single dashes.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.is_empty() && !out.ends_with('-') {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    if out.is_empty() {
        out.push_str("series");
    }
    out
}

/// Pad a degenerate range so every finite value maps inside the axes.
fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

pub fn render(series: &Series) -> String {
    let mut s = String::with_capacity(4096);
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{LEFT:.1}\" y=\"22\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        esc(&series.name)
    ));
    let pts: Vec<(f64, f64)> =
        series.points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    if pts.is_empty() {
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\" \
             fill=\"#888888\">no data</text>\n",
            WIDTH / 2.0 - 28.0,
            HEIGHT / 2.0
        ));
        s.push_str("</svg>\n");
        return s;
    }

    let (xmin, xmax) = span(
        pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
    );
    let (ymin, ymax) = span(
        pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
    );
    let px = |x: f64| LEFT + (x - xmin) / (xmax - xmin) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - (y - ymin) / (ymax - ymin) * (HEIGHT - TOP - BOTTOM);

    for i in 0..TICKS {
        let frac = i as f64 / (TICKS - 1) as f64;
        let xv = xmin + frac * (xmax - xmin);
        let yv = ymin + frac * (ymax - ymin);
        let gx = px(xv);
        let gy = py(yv);
        s.push_str(&format!(
            "<line x1=\"{gx:.2}\" y1=\"{TOP:.1}\" x2=\"{gx:.2}\" y2=\"{:.1}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            HEIGHT - BOTTOM
        ));
        s.push_str(&format!(
            "<line x1=\"{LEFT:.1}\" y1=\"{gy:.2}\" x2=\"{:.1}\" y2=\"{gy:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            WIDTH - RIGHT
        ));
        s.push_str(&format!(
            "<text x=\"{gx:.2}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"10\" \
             text-anchor=\"middle\">{}</text>\n",
            HEIGHT - BOTTOM + 16.0,
            tick_label(xv)
        ));
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"10\" \
             text-anchor=\"end\">{}</text>\n",
            LEFT - 6.0,
            gy + 3.0,
            tick_label(yv)
        ));
    }
    s.push_str(&format!(
        "<line x1=\"{LEFT:.1}\" y1=\"{0:.1}\" x2=\"{1:.1}\" y2=\"{0:.1}\" stroke=\"black\" \
         stroke-width=\"1\"/>\n",
        HEIGHT - BOTTOM,
        WIDTH - RIGHT
    ));
    s.push_str(&format!(
        "<line x1=\"{LEFT:.1}\" y1=\"{TOP:.1}\" x2=\"{LEFT:.1}\" y2=\"{:.1}\" stroke=\"black\" \
         stroke-width=\"1\"/>\n",
        HEIGHT - BOTTOM
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" \
         text-anchor=\"middle\">{}</text>\n",
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 10.0,
        esc(&series.x_label)
    ));
    s.push_str(&format!(
        "<text x=\"8\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">{}</text>\n",
        TOP - 8.0,
        esc(&series.y_label)
    ));

    let coords: Vec<String> =
        pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    s.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#1f6fb5\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        coords.join(" ")
    ));
    if pts.len() <= 64 {
        for &(x, y) in &pts {
            s.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#1f6fb5\"/>\n",
                px(x),
                py(y)
            ));
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Render every series of the report into `dir`, one SVG per series, names
/// slugged from the series names with `-2`, `-3`, ... on collisions.
pub fn write_all(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut used: BTreeMap<String, usize> = BTreeMap::new();
    let mut written = Vec::new();
    for series in &report.series {
        let base = slug(&series.name);
        let count = used.entry(base.clone()).and_modify(|n| *n += 1).or_insert(1);
        let file = if *count == 1 { format!("{base}.svg") } else { format!("{base}-{count}.svg") };
        let path = dir.join(file);
        fs::write(&path, render(series))?;
        written.push(path);
    }
    Ok(written)
}
