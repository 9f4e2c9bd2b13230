//! Minimal self-contained SVG line plots: logarithmic ordinate (phonon
//! numbers span decades), optional logarithmic abscissa, no runtime
//! dependencies — the file is written directly.

use std::fmt::Write as _;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 58.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

struct AxisScale {
    min: f64,
    max: f64,
    log: bool,
}

impl AxisScale {
    fn position(&self, v: f64, lo_px: f64, hi_px: f64) -> Option<f64> {
        let (v, min, max) = if self.log {
            if v <= 0.0 {
                return None;
            }
            (v.ln(), self.min.ln(), self.max.ln())
        } else {
            (v, self.min, self.max)
        };
        if !v.is_finite() {
            return None;
        }
        let f = (v - min) / (max - min);
        Some(lo_px + f * (hi_px - lo_px))
    }
}

fn finite_range(values: impl Iterator<Item = f64>, log: bool) -> Option<(f64, f64)> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        if v.is_finite() && (!log || v > 0.0) {
            min = min.min(v);
            max = max.max(v);
        }
    }
    (min <= max).then_some((min, max))
}

fn pad(min: f64, max: f64, log: bool) -> (f64, f64) {
    if log {
        (min / 1.4, max * 1.4)
    } else if min == max {
        (min - 0.5, max + 0.5)
    } else {
        let d = 0.04 * (max - min);
        (min - d, max + d)
    }
}

/// Tick positions at 1, 2, 5 per decade inside the range; falls back to the
/// endpoints when the range is too narrow to contain any.
fn log_ticks(min: f64, max: f64) -> Vec<f64> {
    let mut ticks = Vec::new();
    let lo = min.log10().floor() as i32 - 1;
    let hi = max.log10().ceil() as i32 + 1;
    for e in lo..=hi {
        for m in [1.0, 2.0, 5.0] {
            let v = m * 10f64.powi(e);
            if v >= min && v <= max {
                ticks.push(v);
            }
        }
    }
    if ticks.len() < 2 {
        ticks = vec![min, max];
    }
    ticks
}

fn linear_ticks(min: f64, max: f64) -> Vec<f64> {
    let range = max - min;
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| range / s <= 6.0)
        .unwrap_or(raw);
    let mut ticks = Vec::new();
    let mut v = (min / step).ceil() * step;
    while v <= max + 1e-12 * range {
        ticks.push(v);
        v += step;
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1e4 || a < 1e-3 {
        format!("{v:e}")
    } else {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    log_x: bool,
    series: &[Series],
) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="26" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let x_range = finite_range(
        series.iter().flat_map(|s| s.points.iter().map(|p| p.0)),
        log_x,
    );
    let y_range = finite_range(
        series.iter().flat_map(|s| s.points.iter().map(|p| p.1)),
        true,
    );
    let (Some((x_min, x_max)), Some((y_min, y_max))) = (x_range, y_range) else {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">no plottable data</text>"#,
            WIDTH / 2.0,
            HEIGHT / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    };
    let (x_min, x_max) = pad(x_min, x_max, log_x);
    let (y_min, y_max) = pad(y_min, y_max, true);
    let xs = AxisScale {
        min: x_min,
        max: x_max,
        log: log_x,
    };
    let ys = AxisScale {
        min: y_min,
        max: y_max,
        log: true,
    };
    let (left, right) = (MARGIN_L, WIDTH - MARGIN_R);
    let (top, bottom) = (MARGIN_T, HEIGHT - MARGIN_B);
    let x_px = |v: f64| xs.position(v, left, right);
    let y_px = |v: f64| ys.position(v, bottom, top);

    // Grid and ticks.
    let x_ticks = if log_x {
        log_ticks(x_min, x_max)
    } else {
        linear_ticks(x_min, x_max)
    };
    for &t in &x_ticks {
        if let Some(px) = x_px(t) {
            let _ = writeln!(
                svg,
                r##"<line x1="{px:.2}" y1="{top:.1}" x2="{px:.2}" y2="{bottom:.1}" stroke="#e0e0e0" stroke-width="1"/>"##
            );
            let _ = writeln!(
                svg,
                r#"<text x="{px:.2}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
                bottom + 18.0,
                fmt_tick(t)
            );
        }
    }
    for t in log_ticks(y_min, y_max) {
        if let Some(py) = y_px(t) {
            let _ = writeln!(
                svg,
                r##"<line x1="{left:.1}" y1="{py:.2}" x2="{right:.1}" y2="{py:.2}" stroke="#e0e0e0" stroke-width="1"/>"##
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
                left - 6.0,
                py + 4.0,
                fmt_tick(t)
            );
        }
    }

    // Axes frame and labels.
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black" stroke-width="1.2"/>"#,
        right - left,
        bottom - top
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.1}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(y_label)
    );

    // Data, split into segments at unplottable points.
    for (idx, s) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let dash = if s.dashed {
            r#" stroke-dasharray="7,4""#
        } else {
            ""
        };
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let flush = |seg: &mut Vec<(f64, f64)>, svg: &mut String| {
            if seg.len() >= 2 {
                let pts: Vec<String> =
                    seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#,
                    pts.join(" ")
                );
            }
            seg.clear();
        };
        for &(x, y) in &s.points {
            match (x_px(x), y_px(y)) {
                (Some(px), Some(py)) => segment.push((px, py)),
                _ => flush(&mut segment, &mut svg),
            }
        }
        flush(&mut segment, &mut svg);
    }

    // Legend.
    for (idx, s) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let y = top + 16.0 + 18.0 * idx as f64;
        let dash = if s.dashed {
            r#" stroke-dasharray="7,4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="1.8"{dash}/>"#,
            right - 150.0,
            right - 118.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{y:.1}" font-size="12" dominant-baseline="middle">{}</text>"#,
            right - 112.0,
            escape(&s.label)
        );
    }

    svg.push_str("</svg>\n");
    svg
}
