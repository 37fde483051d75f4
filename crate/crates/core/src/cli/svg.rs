//! Minimal line charts: one polyline per series on a fixed 800×500 canvas.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
/// Longer series are thinned to about this many vertices.
const MAX_VERTICES: usize = 1000;

pub struct LineChart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Each series is a list of `(x, y)` points.
    pub series: &'a [Vec<(f64, f64)>],
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LineChart<'_> {
    pub fn render(&self) -> String {
        let points = || self.series.iter().flatten();
        let (x_lo, x_hi) = bounds(points().map(|p| p.0));
        // keep the zero line in view
        let (y_lo, y_hi) = bounds(points().map(|p| p.1).chain([0.0]));
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(self.title)
        );
        // axes
        let _ = writeln!(
            s,
            r#"<polyline points="{LEFT},{TOP} {LEFT},{} {},{}" fill="none" stroke="black"/>"#,
            TOP + plot_h,
            LEFT + plot_w,
            TOP + plot_h
        );
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            LEFT + plot_w,
            y = sy(0.0)
        );
        for (v, anchor_x, anchor_y, align) in [
            (x_lo, sx(x_lo), TOP + plot_h + 18.0, "start"),
            (x_hi, sx(x_hi), TOP + plot_h + 18.0, "end"),
        ] {
            let _ = writeln!(
                s,
                r#"<text x="{anchor_x:.2}" y="{anchor_y:.2}" font-size="12" text-anchor="{align}">{}</text>"#,
                super::fmt_num(v)
            );
        }
        for v in [y_lo, 0.0, y_hi] {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                sy(v) + 4.0,
                super::fmt_num(v)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 16.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="{y:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {y:.2})">{}</text>"#,
            escape(self.y_label),
            y = TOP + plot_h / 2.0
        );

        for (k, series) in self.series.iter().enumerate() {
            let stride = series.len().div_ceil(MAX_VERTICES).max(1);
            let mut pts = String::new();
            let last = series.len().saturating_sub(1);
            for (i, &(x, y)) in series.iter().enumerate() {
                if (i % stride == 0 || i == last) && x.is_finite() && y.is_finite() {
                    let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
                }
            }
            // fixed hue rotation keeps the output deterministic
            let hue = (k * 47) % 360;
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="hsl({hue},60%,45%)" stroke-width="0.8" stroke-opacity="0.7"/>"#,
                pts.trim_end()
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
