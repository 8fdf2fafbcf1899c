//! Minimal scatter plots: axes, points with error bars, and the two
//! perfect-fairness guides (blue dashed at IB_G = 0, red dashed at Φ = 0).

use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 360.0;
const MARGIN: f64 = 48.0;

pub struct Point {
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub x_err: Option<f64>,
    pub y_err: Option<f64>,
}

fn range(values: impl Iterator<Item = f64>, pad_to_zero: bool) -> (f64, f64) {
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
        (l.min(v), h.max(v))
    });
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if pad_to_zero {
        lo = lo.min(0.0);
        hi = hi.max(0.0);
    }
    if hi - lo < 1e-9 {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Renders `points` with IB_G on x. `phi_axis` adds the red Φ = 0 guide.
pub fn scatter(title: &str, y_label: &str, points: &[Point], phi_axis: bool) -> String {
    let (x0, x1) = range(
        points
            .iter()
            .flat_map(|p| [p.x - p.x_err.unwrap_or(0.0), p.x + p.x_err.unwrap_or(0.0)]),
        true,
    );
    let (y0, y1) = range(
        points
            .iter()
            .flat_map(|p| [p.y - p.y_err.unwrap_or(0.0), p.y + p.y_err.unwrap_or(0.0)]),
        phi_axis,
    );
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="16" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let (left, right, top, bottom) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top}V{bottom}H{right}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">IB_G</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for (v, x, y, anchor) in [
        (x0, left, bottom + 14.0, "start"),
        (x1, right, bottom + 14.0, "end"),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3}</text>"#
        );
    }
    for (v, y) in [(y0, bottom), (y1, top + 8.0)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end">{v:.3}</text>"#,
            left - 4.0
        );
    }
    let gx = sx(0.0);
    let _ = writeln!(
        s,
        r#"<line x1="{gx:.2}" y1="{top}" x2="{gx:.2}" y2="{bottom}" stroke="blue" stroke-dasharray="6 4"/>"#
    );
    if phi_axis {
        let gy = sy(0.0);
        let _ = writeln!(
            s,
            r#"<line x1="{left}" y1="{gy:.2}" x2="{right}" y2="{gy:.2}" stroke="red" stroke-dasharray="6 4"/>"#
        );
    }
    for p in points {
        let (cx, cy) = (sx(p.x), sy(p.y));
        if let Some(e) = p.x_err.filter(|e| *e > 0.0) {
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="gray"/>"#,
                sx(p.x - e),
                sx(p.x + e)
            );
        }
        if let Some(e) = p.y_err.filter(|e| *e > 0.0) {
            let _ = writeln!(
                s,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="gray"/>"#,
                sy(p.y - e),
                sy(p.y + e)
            );
        }
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3.5"><title>{}</title></circle>"#,
            escape(&p.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
