//! Minimal static SVG: line/marker plots and a colored strip for phase bands.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub enum Style {
    Line,
    Markers,
}

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let d = lo.abs().max(1.0) * 0.5;
        return (lo - d, hi + d);
    }
    let d = 0.05 * (hi - lo);
    (lo - d, hi + d)
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: Option<&str>) {
    let (xa, xb) = (LEFT, WIDTH - RIGHT);
    let (ya, yb) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r#"<path d="M{xa:.1},{yb:.1} V{ya:.1} H{xb:.1}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let x = f.x0 + (f.x1 - f.x0) * i as f64 / 5.0;
        let px = f.px(x);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.1}" y1="{ya:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            ya + 5.0,
            ya + 18.0,
            tick(x)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (xa + xb) / 2.0,
        HEIGHT - 10.0,
        escape(xlabel)
    );
    if let Some(ylabel) = ylabel {
        for i in 0..=5 {
            let y = f.y0 + (f.y1 - f.y0) * i as f64 / 5.0;
            let py = f.py(y);
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{py:.1}" x2="{xa:.1}" y2="{py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                xa - 5.0,
                xa - 8.0,
                py + 4.0,
                tick(y)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            (ya + yb) / 2.0,
            (ya + yb) / 2.0,
            escape(ylabel)
        );
    }
}

fn tick(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if !(1e-3..1e4).contains(&a) {
        format!("{x:.2e}")
    } else {
        let s = format!("{x:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn legend(out: &mut String, items: &[(&str, &str)]) {
    for (i, (label, color)) in items.iter().enumerate() {
        let x = LEFT + 10.0 + 110.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.1}" y="{:.1}" width="12" height="12" fill="{color}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            TOP - 2.0,
            x + 16.0,
            TOP + 8.0,
            escape(label)
        );
    }
}

pub fn plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let pts = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut xl, mut xh, mut yl, mut yh) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        xl = xl.min(x);
        xh = xh.max(x);
        yl = yl.min(y);
        yh = yh.max(y);
    }
    let (x0, x1) = padded(xl, xh);
    let (y0, y1) = padded(yl, yh);
    let frame = Frame { x0, x1, y0, y1 };

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, xlabel, Some(ylabel));
    for s in series {
        let finite = s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite());
        match s.style {
            Style::Line => {
                let mut d = String::new();
                for (i, &(x, y)) in finite.enumerate() {
                    let _ = write!(d, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, frame.px(x), frame.py(y));
                }
                let _ = writeln!(
                    out,
                    r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                    d.trim_end(),
                    s.color
                );
            }
            Style::Markers => {
                for &(x, y) in finite {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                        frame.px(x),
                        frame.py(y),
                        s.color
                    );
                }
            }
        }
    }
    let items: Vec<(&str, &str)> = series.iter().map(|s| (s.label.as_str(), s.color)).collect();
    legend(&mut out, &items);
    out.push_str("</svg>\n");
    out
}

/// One colored rectangle per `(lo, hi, color)` segment along a single axis.
pub fn strip(title: &str, xlabel: &str, range: (f64, f64), segments: &[(f64, f64, &str)], legend_items: &[(&str, &str)]) -> String {
    let frame = Frame {
        x0: range.0,
        x1: range.1,
        y0: 0.0,
        y1: 1.0,
    };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, xlabel, None);
    let (ya, yb) = (frame.py(0.25), frame.py(0.75));
    for &(lo, hi, color) in segments {
        let (a, b) = (frame.px(lo), frame.px(hi));
        let _ = writeln!(
            out,
            r#"<rect x="{a:.2}" y="{yb:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
            (b - a).max(0.5),
            ya - yb
        );
    }
    legend(&mut out, legend_items);
    out.push_str("</svg>\n");
    out
}
