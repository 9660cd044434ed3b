//! Deterministic SVG rendering of crease patterns.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Assignment, CreasePattern};

/// Stroke styling. One model unit maps to one SVG user unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvgStyle {
    pub mountain_width: f64,
    pub valley_width: f64,
    pub border_width: f64,
    pub flat_width: f64,
    /// `stroke-dasharray` used for valleys.
    pub valley_dash: String,
    /// Blank space around the pattern's bounding box.
    pub margin: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            mountain_width: 0.02,
            valley_width: 0.02,
            border_width: 0.05,
            flat_width: 0.01,
            valley_dash: "0.08 0.04".to_string(),
            margin: 0.1,
        }
    }
}

/// Renders creases in index order: mountains solid red, valleys dashed blue,
/// borders heavy black, unfolded creases thin grey.
pub fn to_svg(cp: &CreasePattern, style: &SvgStyle) -> String {
    let (mut lo, mut hi) = ([0.0_f64; 2], [0.0_f64; 2]);
    if let Some(first) = cp.vertices().first() {
        lo = *first;
        hi = *first;
    }
    for v in cp.vertices() {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let m = style.margin;
    let (x0, y0) = (lo[0] - m, lo[1] - m);
    let (w, h) = (hi[0] - lo[0] + 2.0 * m, hi[1] - lo[1] + 2.0 * m);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0} {y0} {w} {h}" width="{w}" height="{h}">"#
    );
    // Flip y so the pattern keeps its mathematical orientation.
    let _ = writeln!(out, r#"<g transform="matrix(1 0 0 -1 0 {})">"#, 2.0 * y0 + h);
    for crease in cp.creases() {
        let [a, b] = crease.vertices;
        let (p, q) = (cp.vertices()[a], cp.vertices()[b]);
        let stroke = match crease.assignment {
            Assignment::Mountain => format!(r##"stroke="#d62728" stroke-width="{}""##, style.mountain_width),
            Assignment::Valley => format!(
                r##"stroke="#1f77b4" stroke-width="{}" stroke-dasharray="{}""##,
                style.valley_width, style.valley_dash
            ),
            Assignment::Border => format!(r##"stroke="#000000" stroke-width="{}""##, style.border_width),
            Assignment::Flat => format!(r##"stroke="#999999" stroke-width="{}""##, style.flat_width),
        };
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" {stroke} stroke-linecap="round"/>"#,
            p[0], p[1], q[0], q[1]
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
