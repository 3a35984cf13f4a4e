//! Minimal static SVG output: line plots for spectra and heatmaps for joint
//! maps. Styling is fixed and all coordinates are printed with two decimals,
//! so identical data gives identical bytes.

use std::fmt::Write;

use crate::spectra::JointSpectralMap;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 4] = ["#1f4e9c", "#c0392b", "#2e8b57", "#7d3c98"];
/// Heatmaps are block-averaged down to at most this many cells per axis.
const MAX_CELLS: usize = 200;

pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10()).ceil() as usize };
    format!("{v:.decimals$}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (t, b) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    let xs = nice_step(f.x1 - f.x0);
    for x in ticks(f.x0, f.x1) {
        let px = f.px(x);
        let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, b + 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            b + 18.0,
            fmt_tick(x, xs)
        );
    }
    let ys = nice_step(f.y1 - f.y0);
    for y in ticks(f.y0, f.y1) {
        let py = f.py(y);
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{py:.2}" x2="{l:.2}" y2="{py:.2}" stroke="black"/>"#, l - 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 8.0,
            py + 4.0,
            fmt_tick(y, ys)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">{1}</text>"#,
        (t + b) / 2.0,
        escape(y_label)
    );
}

/// Line plot of one or more series sharing the axes.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > 0.0) {
        y1 = 1.0;
    }
    let f = Frame {
        x0,
        x1,
        y0: 0.0,
        y1: y1 * 1.05,
    };

    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &f, x_label, y_label);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, f.px(x), f.py(y));
        }
        let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#);
        if series.len() > 1 {
            let y = MARGIN_TOP + 16.0 + 16.0 * k as f64;
            let x = WIDTH - MARGIN_RIGHT - 120.0;
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
                y - 4.0,
                x + 20.0,
                y - 4.0
            );
            let _ = writeln!(out, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, x + 26.0, escape(s.label));
        }
    }
    out.push_str("</svg>\n");
    out
}

fn colormap(t: f64) -> (u8, u8, u8) {
    // dark blue → teal → green → yellow
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let lerp = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    (lerp(a.0, b.0), lerp(a.1, b.1), lerp(a.2, b.2))
}

fn block_average(map: &JointSpectralMap) -> (usize, usize, Vec<f64>) {
    let (n1, n2) = (map.lambda1_axis.len(), map.lambda2_axis.len());
    let b1 = n1.div_ceil(MAX_CELLS);
    let b2 = n2.div_ceil(MAX_CELLS);
    let (m1, m2) = (n1.div_ceil(b1), n2.div_ceil(b2));
    let mut cells = vec![0.0; m1 * m2];
    for ci in 0..m1 {
        for cj in 0..m2 {
            let mut acc = 0.0;
            let mut count = 0usize;
            for i in ci * b1..((ci + 1) * b1).min(n1) {
                for j in cj * b2..((cj + 1) * b2).min(n2) {
                    acc += map.get(i, j);
                    count += 1;
                }
            }
            cells[ci * m2 + cj] = acc / count as f64;
        }
    }
    (m1, m2, cells)
}

/// Heatmap with `λ₂` on the horizontal and `λ₁` on the vertical axis.
pub fn heatmap(title: &str, map: &JointSpectralMap) -> String {
    let f = Frame {
        x0: map.lambda2_axis[0],
        x1: *map.lambda2_axis.last().expect("non-empty axis"),
        y0: map.lambda1_axis[0],
        y1: *map.lambda1_axis.last().expect("non-empty axis"),
    };
    let (m1, m2, cells) = block_average(map);
    let vmax = cells.iter().copied().fold(0.0, f64::max);
    let vmax = if vmax > 0.0 { vmax } else { 1.0 };
    let cw = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / m2 as f64;
    let ch = (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) / m1 as f64;

    let mut out = String::new();
    open(&mut out, title);
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for ci in 0..m1 {
        let y = HEIGHT - MARGIN_BOTTOM - (ci + 1) as f64 * ch;
        for cj in 0..m2 {
            let (r, g, b) = colormap(cells[ci * m2 + cj] / vmax);
            let x = MARGIN_LEFT + cj as f64 * cw;
            let _ = writeln!(
                out,
                r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                cw + 0.01,
                ch + 0.01
            );
        }
    }
    out.push_str("</g>\n");
    axes(&mut out, &f, "λ₂ (nm)", "λ₁ (nm)");
    out.push_str("</svg>\n");
    out
}
