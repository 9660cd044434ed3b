use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{add_zigzag, check_separation, group_lines, parity_assignment, require_positive, GeneratorError, Result};
use crate::kinematics::{compound_start_angle, SpringJointSpec};
use crate::pattern::{Assignment, CreasePattern, PatternBuilder};

/// Largest mismatch allowed between the joint's start angle and the fold
/// angle of the reverse folds it replaces.
const ANGLE_MATCH_TOLERANCE: f64 = 1e-9;

/// A Miura-ori sheet whose reverse-fold zigzags are replaced by spring-joint
/// groups.
///
/// The sheet has `2 * cols` panels along the pleats (`+x`) and `2 * rows`
/// across them. Each interior zigzag of the plain Miura-ori is a reverse fold
/// with start angle `2 * miura_angle`; the joint must reproduce that angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiuraSubstitutionSpec {
    pub rows: usize,
    pub cols: usize,
    /// Panel size along the pleats.
    pub panel_width: f64,
    /// Panel size across the pleats (the pleat spacing).
    pub panel_height: f64,
    /// Angle between the zigzag segments and the pleats, in `(0, pi/2)`.
    pub miura_angle: f64,
    pub joint: SpringJointSpec,
    /// Distance between neighbouring lines inside a group; defaults to
    /// `panel_width / (2n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_spacing: Option<f64>,
}

impl MiuraSubstitutionSpec {
    /// Spec whose Miura angle is implied by the joint's start angle.
    pub fn for_joint(rows: usize, cols: usize, panel_width: f64, panel_height: f64, joint: SpringJointSpec) -> Self {
        MiuraSubstitutionSpec {
            rows,
            cols,
            panel_width,
            panel_height,
            miura_angle: 0.5 * compound_start_angle(&joint),
            joint,
            group_spacing: None,
        }
    }
}

fn check_grid(rows: usize, cols: usize, w: f64, h: f64, miura_angle: f64) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(GeneratorError::InvalidParams("rows and cols must be at least 1".into()));
    }
    require_positive("panel_width", w)?;
    require_positive("panel_height", h)?;
    if !(miura_angle.is_finite() && miura_angle > 0.0 && miura_angle < 0.5 * PI) {
        return Err(GeneratorError::InvalidParams(format!("miura_angle {miura_angle} is outside (0, pi/2)")));
    }
    Ok(())
}

/// A line of the sheet: base position, zigzag amplitude and assignment.
type Line = (f64, f64, Assignment);

fn emit(lines: &[Line], width: f64, height: f64, h: f64, pleat_rows: usize) -> Result<CreasePattern> {
    let mut b = PatternBuilder::new();
    b.add_polyline(&[[0.0, 0.0], [width, 0.0], [width, height], [0.0, height], [0.0, 0.0]], Assignment::Border);
    for &(x, a, assignment) in lines {
        add_zigzag(&mut b, x, a, h, 2 * pleat_rows, height, assignment);
    }
    for j in 1..2 * pleat_rows {
        let y = j as f64 * h;
        let mut points = vec![[0.0, y]];
        points.extend(lines.iter().map(|&(x, a, _)| [x + (j % 2) as f64 * a, y]));
        points.push([width, y]);
        for (s, seg) in points.windows(2).enumerate() {
            b.add_segment(seg[0], seg[1], parity_assignment(j + s));
        }
    }
    Ok(b.build()?)
}

fn check_lines(lines: &[Line], width: f64) -> Result<()> {
    let mut all = vec![(0.0, 0.0)];
    all.extend(lines.iter().map(|&(x, a, _)| (x, a)));
    all.push((width, 0.0));
    for (i, pair) in all.windows(2).enumerate() {
        check_separation(pair[0], pair[1], &format!("lines {i} and {}", i + 1))?;
    }
    Ok(())
}

/// Reference Miura-ori: parallel zigzags of uniform sign, alternating from
/// line to line, crossing straight pleats that flip sign at every zigzag.
pub fn gen_plain_miura(rows: usize, cols: usize, panel_width: f64, panel_height: f64, miura_angle: f64) -> Result<CreasePattern> {
    check_grid(rows, cols, panel_width, panel_height, miura_angle)?;
    let amplitude = panel_height / miura_angle.tan();
    let lines: Vec<Line> = (1..2 * cols)
        .map(|m| (m as f64 * panel_width, amplitude, parity_assignment(m)))
        .collect();
    let width = 2.0 * cols as f64 * panel_width;
    check_lines(&lines, width)?;
    emit(&lines, width, 2.0 * rows as f64 * panel_height, panel_height, rows)
}

/// Miura-ori with every interior zigzag replaced by the straight spring-joint
/// group, centred on the zigzag it replaces. Zigzags of opposite sign get the
/// mirrored group (constituents in reverse order, signs swapped).
pub fn gen_miura_with_spring_joints(spec: &MiuraSubstitutionSpec) -> Result<CreasePattern> {
    let (w, h) = (spec.panel_width, spec.panel_height);
    check_grid(spec.rows, spec.cols, w, h, spec.miura_angle)?;
    let start = compound_start_angle(&spec.joint);
    if (start - 2.0 * spec.miura_angle).abs() > ANGLE_MATCH_TOLERANCE {
        return Err(GeneratorError::InvalidParams(format!(
            "joint start angle {start} does not match the reverse-fold angle 2 * miura_angle = {}",
            2.0 * spec.miura_angle
        )));
    }
    let n = spec.joint.len();
    let g = spec.group_spacing.unwrap_or(w / (2 * n) as f64);
    require_positive("group_spacing", g)?;

    let forward = group_lines(spec.joint.constituents(), h);
    let mut reversed_angles = spec.joint.constituents().to_vec();
    reversed_angles.reverse();
    let backward = group_lines(&reversed_angles, h);
    let group_extent = (2 * n - 2) as f64 * g + forward.iter().map(|l| l.amplitude).fold(0.0, f64::max);
    if group_extent >= w {
        return Err(GeneratorError::Geometry(format!(
            "spring-joint group extent {group_extent} does not fit within panel width {w}"
        )));
    }

    let mut lines: Vec<Line> = Vec::new();
    for m in 1..2 * spec.cols {
        let group = if m % 2 == 1 { &forward } else { &backward };
        let own = parity_assignment(m);
        let center = m as f64 * w;
        for (k, line) in group.iter().enumerate() {
            let x = center + (k as f64 - (n - 1) as f64) * g;
            let assignment = if line.primary { own } else { own.opposite() };
            lines.push((x, line.amplitude, assignment));
        }
    }
    let width = 2.0 * spec.cols as f64 * w;
    check_lines(&lines, width)?;
    emit(&lines, width, 2.0 * spec.rows as f64 * h, h, spec.rows)
}
