use serde::{Deserialize, Serialize};

use super::{add_zigzag, check_separation, group_lines, parity_assignment, require_positive, GeneratorError, Result};
use crate::kinematics::SpringJointSpec;
use crate::pattern::{flat_fold_map, Assignment, CreasePattern, PatternBuilder, GEOMETRY_TOLERANCE};

/// A straight spring joint across a pleated strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StraightJointParams {
    pub joint: SpringJointSpec,
    /// Width of the strip across the pleats.
    pub strip_width: f64,
    /// Distance between neighbouring pleats.
    pub pleat_width: f64,
    /// Distance between neighbouring fold lines of the group along the
    /// pleats; defaults to `pleat_width`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_spacing: Option<f64>,
}

impl StraightJointParams {
    pub fn new(joint: SpringJointSpec, strip_width: f64, pleat_width: f64) -> Self {
        StraightJointParams { joint, strip_width, pleat_width, group_spacing: None }
    }
}

/// Emits the strip crease pattern: `n` reverse-fold zigzags interleaved with
/// `n - 1` pi-folds of the opposite sign, crossing pleats that flip sign at
/// every fold line. Target fold angles are those of the flat-folded state.
pub fn gen_straight_spring_joint(params: &StraightJointParams) -> Result<CreasePattern> {
    let p = params.pleat_width;
    let w = params.strip_width;
    require_positive("pleat_width", p)?;
    require_positive("strip_width", w)?;
    if p >= w {
        return Err(GeneratorError::InvalidParams(format!(
            "pleat_width {p} must be smaller than strip_width {w}"
        )));
    }
    let g = params.group_spacing.unwrap_or(p);
    require_positive("group_spacing", g)?;

    let lines = group_lines(params.joint.constituents(), p);
    let max_amplitude = lines.iter().map(|l| l.amplitude).fold(0.0, f64::max);
    let margin = g.max(p);
    let xs: Vec<f64> = (0..lines.len()).map(|k| margin + k as f64 * g).collect();
    for k in 1..lines.len() {
        check_separation(
            (xs[k - 1], lines[k - 1].amplitude),
            (xs[k], lines[k].amplitude),
            &format!("fold lines {k} and {}", k + 1),
        )?;
    }
    let length = xs[xs.len() - 1] + max_amplitude + margin;
    let rows = ((w / p).ceil() as usize).saturating_sub(1).max(1);
    let rows = if rows as f64 * p >= w - GEOMETRY_TOLERANCE { rows - 1 } else { rows };

    let mut b = PatternBuilder::new();
    b.add_polyline(&[[0.0, 0.0], [length, 0.0], [length, w], [0.0, w], [0.0, 0.0]], Assignment::Border);
    for (k, (line, &x)) in lines.iter().zip(&xs).enumerate() {
        // Reverse folds are valleys, the pi-folds between them mountains.
        let assignment = if line.primary { Assignment::Valley } else { Assignment::Mountain };
        debug_assert_eq!(line.primary, k % 2 == 0);
        add_zigzag(&mut b, x, line.amplitude, p, rows, w, assignment);
    }
    for j in 1..=rows {
        let y = j as f64 * p;
        let mut points = vec![[0.0, y]];
        points.extend(lines.iter().zip(&xs).map(|(l, &x)| [x + (j % 2) as f64 * l.amplitude, y]));
        points.push([length, y]);
        for (s, seg) in points.windows(2).enumerate() {
            b.add_segment(seg[0], seg[1], parity_assignment(j + s));
        }
    }
    Ok(b.build()?)
}

/// Turn of the strip axis in the flat-folded state: the folded image of the
/// `+x` direction in the face at the bottom-right corner of the strip,
/// relative to the face at its bottom-left corner, wrapped to `(-pi, pi]`.
pub fn pattern_start_angle(cp: &CreasePattern, tol: f64) -> Result<f64> {
    let faces = cp.faces();
    let vs = cp.vertices();
    let corner = |right: bool| {
        (0..vs.len()).min_by(|&a, &b| {
            let (pa, pb) = (vs[a], vs[b]);
            let x = if right { pb[0].total_cmp(&pa[0]) } else { pa[0].total_cmp(&pb[0]) };
            x.then(pa[1].total_cmp(&pb[1]))
        })
    };
    let face_at = |v: usize| faces.iter().position(|f| f.vertices.contains(&v));
    let missing = || GeneratorError::Geometry("pattern has no corner faces".into());
    let first = corner(false).and_then(face_at).ok_or_else(missing)?;
    let last = corner(true).and_then(face_at).ok_or_else(missing)?;
    let map = flat_fold_map(cp, first, tol)?;
    let d = map.transforms[last].apply_vector([1.0, 0.0]);
    Ok(d[1].atan2(d[0]))
}
