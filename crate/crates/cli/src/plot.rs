//! Static SVG line and marker plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::output::emit;

pub const MAX_SERIES: usize = 4;
const COLORS: [&str; MAX_SERIES] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const W: f64 = 480.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<[f64; 2]>,
    /// Draw markers instead of a polyline.
    pub markers: bool,
}

pub struct Axes<'a> {
    pub x: &'a str,
    pub y: &'a str,
}

fn bounds(series: &[Series]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in series.iter().flat_map(|s| &s.points) {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    for k in 0..2 {
        let span = (hi[k] - lo[k]).max(1.0);
        lo[k] -= 0.1 * span;
        hi[k] += 0.1 * span;
    }
    (lo, hi)
}

/// Render at most four series; coordinates are printed with fixed precision so the output is
/// byte-stable.
pub fn render(series: &[Series], axes: &Axes) -> CliResult<String> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return Err(CliError::Input("nothing to plot: empty series".into()));
    }
    if series.len() > MAX_SERIES {
        return Err(CliError::Input(format!("{} series exceed the limit of {MAX_SERIES}", series.len())));
    }
    if series.iter().flat_map(|s| &s.points).any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(CliError::Input("non-finite plot coordinate".into()));
    }
    let (lo, hi) = bounds(series);
    let sx = |x: f64| PAD + (x - lo[0]) / (hi[0] - lo[0]) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - lo[1]) / (hi[1] - lo[1]) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    if lo[0] < 0.0 && hi[0] > 0.0 {
        let _ =
            writeln!(s, r##"<line x1="{0:.3}" y1="{PAD}" x2="{0:.3}" y2="{1}" stroke="#bbbbbb"/>"##, sx(0.0), H - PAD);
    }
    if lo[1] < 0.0 && hi[1] > 0.0 {
        let _ =
            writeln!(s, r##"<line x1="{PAD}" y1="{0:.3}" x2="{1}" y2="{0:.3}" stroke="#bbbbbb"/>"##, sy(0.0), W - PAD);
    }
    for (i, ser) in series.iter().enumerate() {
        let c = COLORS[i];
        if ser.markers {
            for p in &ser.points {
                let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="{c}"/>"#, sx(p[0]), sy(p[1]));
            }
        } else {
            let pts: Vec<String> = ser.points.iter().map(|p| format!("{:.3},{:.3}", sx(p[0]), sy(p[1]))).collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#, pts.join(" "));
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" fill="{c}">{}</text>"#,
            PAD + 6.0,
            PAD + 16.0 + 14.0 * i as f64,
            escape(&ser.name)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="start">{:.3}</text>"#,
        PAD,
        H - PAD + 16.0,
        lo[0]
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{:.3}</text>"#,
        W - PAD,
        H - PAD + 16.0,
        hi[0]
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{:.3}</text>"#,
        PAD - 4.0,
        H - PAD,
        lo[1]
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{:.3}</text>"#,
        PAD - 4.0,
        PAD + 10.0,
        hi[1]
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{} (bits)</text>"#,
        W / 2.0,
        H - 16.0,
        escape(axes.x)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{} (bits)</text>"#,
        H / 2.0,
        H / 2.0,
        escape(axes.y)
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(series: &[Series], axes: &Axes, path: Option<&Path>) -> CliResult<()> {
    let svg = render(series, axes)?;
    emit(path, &svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Boundary of a two-sender region `{x ≥ a, y ≥ b, x + y ≥ c}`: a vertical ray, the sum edge
/// (if any) and a horizontal ray, truncated `reach` bits beyond the vertices.
pub fn region_boundary(vertices: &[[f64; 2]], reach: f64) -> Vec<[f64; 2]> {
    let first = vertices[0];
    let last = vertices[vertices.len() - 1];
    let mut pts = vec![[first[0], first[1] + reach]];
    pts.extend_from_slice(vertices);
    pts.push([last[0] + reach, last[1]]);
    pts
}
