//! Minimal file-based SVG line plots. No plotting dependency: the outputs
//! are single polylines with axis ticks, which is all the profiles need.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const ML: f64 = 70.0; // left margin leaves room for tick labels
const MR: f64 = 20.0;
const MT: f64 = 30.0;
const MB: f64 = 45.0;

fn span(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-300 {
        let pad = 1e-3 * (1.0 + lo.abs());
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64]) -> String {
    let (x_lo, x_hi) = span(xs);
    let (y_lo, y_hi) = span(ys);
    let sx = |x: f64| ML + (x - x_lo) / (x_hi - x_lo) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y_lo) / (y_hi - y_lo) * (H - MT - MB);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"20\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        title
    );
    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.1}\" stroke=\"black\"/>",
        H - MB
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        H - MB,
        W - MR,
        H - MB
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = x_lo + f * (x_hi - x_lo);
        let yv = y_lo + f * (y_hi - y_lo);
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">{:.4}</text>",
            sx(xv),
            H - MB + 16.0,
            xv
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">{:.4e}</text>",
            ML - 6.0,
            sy(yv) + 3.0,
            yv
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        (ML + W - MR) / 2.0,
        H - 8.0,
        xlabel
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        ylabel
    );
    let mut points = String::new();
    for k in 0..xs.len().min(ys.len()) {
        let _ = write!(points, "{:.2},{:.2} ", sx(xs[k]), sy(ys[k]));
    }
    let _ = writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\"/>",
        points.trim_end()
    );
    for k in 0..xs.len().min(ys.len()) {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#1f5fa8\"/>",
            sx(xs[k]),
            sy(ys[k])
        );
    }
    svg.push_str("</svg>\n");
    svg
}
