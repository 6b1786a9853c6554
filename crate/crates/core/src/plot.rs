//! Deterministic SVG renderings of map graphs and trajectories on a fixed
//! 800×800 canvas.

use std::fmt::Write;

use crate::maps::PiecewiseLinearMap;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 60.0;
const INNER: f64 = SIZE - 2.0 * MARGIN;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + INNER * (x - self.x0) / (self.x1 - self.x0)
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - MARGIN - INNER * (y - self.y0) / (self.y1 - self.y0)
    }

    fn polyline(&self, out: &mut String, pts: impl Iterator<Item = (f64, f64)>, color: &str) {
        out.push_str("<polyline fill=\"none\" stroke=\"");
        out.push_str(color);
        out.push_str("\" stroke-width=\"1.5\" points=\"");
        for (i, (x, y)) in pts.enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.3},{:.3}", self.px(x), self.py(y));
        }
        out.push_str("\"/>\n");
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">"
    );
    out.push_str("<rect width=\"800\" height=\"800\" fill=\"white\"/>\n");
    let _ = writeln!(
        out,
        "<text x=\"400.000\" y=\"30.000\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, f: &Frame, xticks: &[f64], yticks: &[f64]) {
    let (l, r, t, b) = (MARGIN, SIZE - MARGIN, MARGIN, SIZE - MARGIN);
    let _ = writeln!(
        out,
        "<rect x=\"{l:.3}\" y=\"{t:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"black\"/>",
        r - l,
        b - t
    );
    for &x in xticks {
        let px = f.px(x);
        let _ = writeln!(out, "<line x1=\"{px:.3}\" y1=\"{b:.3}\" x2=\"{px:.3}\" y2=\"{:.3}\" stroke=\"black\"/>", b + 6.0);
        let _ = writeln!(
            out,
            "<text x=\"{px:.3}\" y=\"{:.3}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            b + 22.0,
            tick_label(x)
        );
    }
    for &y in yticks {
        let py = f.py(y);
        let _ = writeln!(out, "<line x1=\"{:.3}\" y1=\"{py:.3}\" x2=\"{l:.3}\" y2=\"{py:.3}\" stroke=\"black\"/>", l - 6.0);
        let _ = writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            l - 10.0,
            py + 4.0,
            tick_label(y)
        );
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

const UNIT_TICKS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Graphs of one or more maps over the unit square, with the diagonal.
pub fn svg_maps(title: &str, maps: &[&PiecewiseLinearMap]) -> String {
    let frame = Frame { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, &UNIT_TICKS, &UNIT_TICKS);
    let _ = writeln!(
        out,
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>",
        frame.px(0.0),
        frame.py(0.0),
        frame.px(1.0),
        frame.py(1.0)
    );
    for (i, f) in maps.iter().enumerate() {
        frame.polyline(&mut out, f.vertices(), COLORS[i % COLORS.len()]);
    }
    out.push_str("</svg>\n");
    out
}

pub fn svg_map(title: &str, f: &PiecewiseLinearMap) -> String {
    svg_maps(title, &[f])
}

/// Step-vs-value polylines. The value axis spans `[0, 1]` widened to fit
/// every state.
pub fn svg_trajectories(title: &str, paths: &[&[f64]]) -> String {
    let steps = paths.iter().map(|p| p.len()).max().unwrap_or(1).saturating_sub(1).max(1);
    let all = paths.iter().flat_map(|p| p.iter().copied());
    let (lo, hi) = all.fold((0.0f64, 1.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let frame = Frame { x0: 0.0, x1: steps as f64, y0: lo, y1: hi };
    let xticks: Vec<f64> = (0..=4).map(|i| (steps as f64 * i as f64 / 4.0).round()).collect();
    let yticks: Vec<f64> = UNIT_TICKS.iter().copied().chain([lo, hi].into_iter().filter(|v| *v < 0.0 || *v > 1.0)).collect();
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, &xticks, &yticks);
    for (i, p) in paths.iter().enumerate() {
        frame.polyline(&mut out, p.iter().enumerate().map(|(n, &x)| (n as f64, x)), COLORS[i % COLORS.len()]);
    }
    out.push_str("</svg>\n");
    out
}

/// Vertex lists of every polyline in an SVG produced here, in canvas units.
pub fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
    svg.lines()
        .filter_map(|l| l.split("points=\"").nth(1))
        .map(|rest| {
            rest.split('"')
                .next()
                .unwrap_or("")
                .split_whitespace()
                .map(|pair| {
                    let (a, b) = pair.split_once(',').expect("x,y pair");
                    (a.parse().unwrap(), b.parse().unwrap())
                })
                .collect()
        })
        .collect()
}

/// Inverse of the unit-square placement used by [`svg_maps`].
pub fn canvas_to_unit(p: (f64, f64)) -> (f64, f64) {
    ((p.0 - MARGIN) / INNER, (SIZE - MARGIN - p.1) / INNER)
}
