//! Minimal deterministic SVG previews: a heatmap for Wigner grids and a
//! polyline chart for spectra and bifurcation branches.
//!
//! Numbers are printed with fixed precision so identical data always yields
//! identical bytes.

use std::fmt::Write as _;

use crate::observables::WignerGrid;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

/// Fixed palette for line series, cycled by index.
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Diverging map on `[-1, 1]`: blue, white, red.
pub fn diverging_color(t: f64) -> (u8, u8, u8) {
    let t = if t.is_finite() { t.clamp(-1.0, 1.0) } else { 0.0 };
    let blend = |a: f64, b: f64, s: f64| (a + (b - a) * s).round() as u8;
    if t >= 0.0 {
        (blend(255.0, 178.0, t), blend(255.0, 24.0, t), blend(255.0, 43.0, t))
    } else {
        let s = -t;
        (blend(255.0, 33.0, s), blend(255.0, 102.0, s), blend(255.0, 172.0, s))
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let pad = |a: f64, b: f64| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title))
        .unwrap();
}

fn axes(out: &mut String, frame: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r) = (frame.px(frame.x0), frame.px(frame.x1));
    let (b, t) = (frame.py(frame.y0), frame.py(frame.y1));
    writeln!(out, r#"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, r - l, b - t)
        .unwrap();
    for k in 0..=4 {
        let s = k as f64 / 4.0;
        let xv = frame.x0 + s * (frame.x1 - frame.x0);
        let yv = frame.y0 + s * (frame.y1 - frame.y0);
        let (xp, yp) = (frame.px(xv), frame.py(yv));
        writeln!(out, r#"<line x1="{xp:.2}" y1="{b:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/>"#, b + 5.0).unwrap();
        writeln!(out, r#"<text x="{xp:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, b + 18.0, tick(xv)).unwrap();
        writeln!(out, r#"<line x1="{:.2}" y1="{yp:.2}" x2="{l:.2}" y2="{yp:.2}" stroke="black"/>"#, l - 5.0).unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, l - 8.0, yp + 4.0, tick(yv)).unwrap();
    }
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (l + r) / 2.0, HEIGHT - 12.0, escape(xlabel))
        .unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    )
    .unwrap();
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Heatmap of a Wigner grid, colors scaled by `max |W|`.
pub fn wigner_heatmap(grid: &WignerGrid, title: &str) -> String {
    let xs = grid.x_axis();
    let ps = grid.p_axis();
    let (dx, dp) = (grid.x.step(), grid.p.step());
    let frame = Frame::new(xs[0] - dx / 2.0, xs[xs.len() - 1] + dx / 2.0, ps[0] - dp / 2.0, ps[ps.len() - 1] + dp / 2.0);
    let scale = grid.max_value().abs().max(grid.min_value().abs());
    let mut out = String::new();
    header(&mut out, title);
    let w = frame.px(dx) - frame.px(0.0);
    let h = frame.py(0.0) - frame.py(dp);
    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for (ip, &p) in ps.iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            let v = grid.at(ix, ip);
            let (r, g, b) = diverging_color(if scale > 0.0 { v / scale } else { 0.0 });
            writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                frame.px(x - dx / 2.0),
                frame.py(p + dp / 2.0),
                w + 0.05,
                h + 0.05
            )
            .unwrap();
        }
    }
    out.push_str("</g>\n");
    axes(&mut out, &frame, "x", "p");
    writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">max |W| = {scale:.4e}</text>"#, WIDTH - MARGIN_RIGHT, 24.0)
        .unwrap();
    out.push_str("</svg>\n");
    out
}

/// One polyline; breaks in a series are expressed by NaN values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, dashed: false }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

/// Line chart of several series on shared axes.
pub fn line_plot(series: &[Series], title: &str, xlabel: &str, ylabel: &str) -> String {
    let finite = series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let ypad = 0.05 * (y1 - y0);
    let frame = Frame::new(x0, x1, y0 - ypad, y1 + ypad);
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, xlabel, ylabel);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let dash = if s.dashed { r#" stroke-dasharray="5,4""# } else { "" };
        for run in s.points.split(|(x, y)| !x.is_finite() || !y.is_finite()) {
            if run.is_empty() {
                continue;
            }
            let pts: Vec<String> = run.iter().map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y))).collect();
            writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                pts.join(" ")
            )
            .unwrap();
        }
        let ly = MARGIN_TOP + 14.0 + 16.0 * k as f64;
        let lx = WIDTH - MARGIN_RIGHT - 150.0;
        writeln!(out, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/>"#, lx + 20.0)
            .unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label)).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::AxisSpec;

    #[test]
    fn colormap_endpoints() {
        assert_eq!(diverging_color(0.0), (255, 255, 255));
        assert_eq!(diverging_color(1.0), (178, 24, 43));
        assert_eq!(diverging_color(-1.0), (33, 102, 172));
        assert_eq!(diverging_color(f64::NAN), (255, 255, 255));
    }

    #[test]
    fn heatmap_has_one_cell_per_sample() {
        let axis = AxisSpec::new(-1.0, 1.0, 3).unwrap();
        let grid = WignerGrid::from_values(axis.clone(), axis, (0..9).map(|k| k as f64 - 4.0).collect()).unwrap();
        let svg = wigner_heatmap(&grid, "test");
        assert_eq!(svg.matches("fill=\"#").count(), 9);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg, wigner_heatmap(&grid, "test"));
    }

    #[test]
    fn nan_breaks_polyline() {
        let s = Series::new("a<b", vec![(0.0, 0.0), (1.0, 1.0), (f64::NAN, f64::NAN), (2.0, 0.0), (3.0, 1.0)]);
        let svg = line_plot(&[s], "t", "x", "y");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b"));
    }

    #[test]
    fn tick_labels() {
        assert_eq!(tick(1.5), "1.5");
        assert_eq!(tick(-0.0001), "0");
        assert_eq!(tick(2.0), "2");
    }
}
