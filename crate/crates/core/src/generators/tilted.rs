use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{parity_assignment, require_positive, GeneratorError, Result};
use crate::pattern::{Assignment, CreasePattern, PatternBuilder};

fn default_pleat_count() -> usize {
    3
}

/// A spring joint whose fold lines cross the pleats obliquely, so that its
/// axis is tilted relative to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltedJointParams {
    /// Offset between consecutive pi-folds; with `l` it sets the lean
    /// `tau = atan(d / l)` of each reverse-fold line.
    pub d: f64,
    /// Length of the pleat segments between consecutive fold lines, measured
    /// along the bottom edge.
    pub l: f64,
    /// Number of reverse folds, at least 2.
    pub n: usize,
    pub pleat_width: f64,
    /// Number of interior pleats.
    #[serde(default = "default_pleat_count")]
    pub pleat_count: usize,
}

impl TiltedJointParams {
    pub fn new(d: f64, l: f64, n: usize, pleat_width: f64) -> Self {
        TiltedJointParams { d, l, n, pleat_width, pleat_count: default_pleat_count() }
    }

    pub fn ratio(&self) -> f64 {
        self.d / self.l
    }
}

/// The generated pattern together with its construction geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedJoint {
    pub pattern: CreasePattern,
    /// First segment of every interior pleat.
    pub input_pleats: Vec<[[f64; 2]; 2]>,
    /// Last segment of every interior pleat.
    pub output_pleats: Vec<[[f64; 2]; 2]>,
    /// Full polyline of every interior pleat.
    pub pleat_polylines: Vec<Vec<[f64; 2]>>,
    /// Direction of the joint axis, through the midpoints of the first and
    /// last fold lines. Emerges from `d`, `l` and `n`.
    pub axis_angle: f64,
}

/// Advance below which a pleat is considered not to move forward.
const ADVANCE_TOLERANCE: f64 = 1e-9;

/// Smallest allowed `|sin|` of the angle between a fold line and the pleats.
const MIN_CROSSING_SINE: f64 = 1e-3;

fn dir(t: f64) -> [f64; 2] {
    [t.cos(), t.sin()]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn wrap(t: f64) -> f64 {
    let mut t = t % (2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    } else if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

/// Builds the tilted joint step by step.
///
/// The strip is bounded by two border rails with `pleat_count` pleats in
/// between, all starting along `+x`. Fold lines are placed one at a time,
/// each anchored on the bottom rail a distance `l` past the previous one.
/// Pi-fold lines run perpendicular to the current pleat direction; reverse-fold
/// lines lean by `tau = atan(d/l)`; the last reverse-fold line instead bisects
/// the current pleat direction and `pi`, returning the pleats to `+x`. At each
/// crossing the pleat continues in the direction fixed by the Kawasaki
/// condition, which for a straight fold line is the mirror image of the
/// incoming pleat. Pleats keep their sign along their length; fold-line
/// segments alternate.
pub fn gen_tilted_spring_joint(params: &TiltedJointParams) -> Result<TiltedJoint> {
    require_positive("d", params.d)?;
    require_positive("l", params.l)?;
    require_positive("pleat_width", params.pleat_width)?;
    if params.n < 2 {
        return Err(GeneratorError::InvalidParams(format!("a tilted joint needs n >= 2, got {}", params.n)));
    }
    if params.pleat_count == 0 {
        return Err(GeneratorError::InvalidParams("pleat_count must be at least 1".into()));
    }
    let fail = |step: String, reason: String| GeneratorError::Construction { step, reason };
    let (p, l) = (params.pleat_width, params.l);
    let rails = params.pleat_count + 2;
    let tau = params.ratio().atan();
    let line_count = 2 * params.n - 1;

    // Step 1: input pleats.
    let mut paths: Vec<Vec<[f64; 2]>> = (0..rails).map(|r| vec![[0.0, r as f64 * p]]).collect();
    let mut heading = 0.0_f64;
    let mut anchor = [l, 0.0];
    let mut fold_lines: Vec<(Vec<[f64; 2]>, bool)> = Vec::with_capacity(line_count);

    // Steps 2-6: place each fold line and refract the pleats across it.
    for i in 1..=line_count {
        let step = format!("fold line {i} of {line_count}");
        let reverse = i % 2 == 1;
        let line_dir = if !reverse {
            heading + 0.5 * PI
        } else if i < line_count {
            heading + 0.5 * PI - tau
        } else {
            0.5 * (heading + PI)
        };
        let sine = (line_dir - heading).sin();
        if sine.abs() < MIN_CROSSING_SINE {
            return Err(fail(step, "fold line is nearly parallel to the pleats; reduce d/l".into()));
        }
        if i > 1 {
            let last = *paths[0].last().expect("rails are non-empty");
            anchor = [last[0] + l * heading.cos(), last[1] + l * heading.sin()];
        }
        let u = dir(line_dir);
        let h = dir(heading);
        let mut points = Vec::with_capacity(rails);
        for (r, path) in paths.iter_mut().enumerate() {
            let c = *path.last().expect("rails are non-empty");
            let offset = [anchor[0] - c[0], anchor[1] - c[1]];
            let advance = cross(offset, u) / cross(h, u);
            if advance <= ADVANCE_TOLERANCE {
                return Err(fail(
                    step,
                    format!("rail {r} does not advance ({advance:.3e}); fold lines cross inside the strip, reduce d/l"),
                ));
            }
            let v = [c[0] + advance * h[0], c[1] + advance * h[1]];
            path.push(v);
            points.push(v);
        }
        // Acute sectors lie below the crossing when the line leans forward.
        let acute_below = (line_dir - heading).cos() > 1e-12;
        fold_lines.push((points, acute_below));
        heading = wrap(PI + 2.0 * line_dir - heading);
        if heading.abs() >= 0.5 * PI {
            return Err(fail(
                format!("fold line {i} of {line_count}"),
                format!("pleats turned to {heading:.4} rad, past perpendicular to the input; reduce d/l"),
            ));
        }
    }

    // Step 7: output pleats run to a common right edge.
    let reach = paths.iter().map(|path| path.last().expect("non-empty")[0]).fold(f64::NEG_INFINITY, f64::max);
    let x_end = reach + l;
    for path in &mut paths {
        let c = *path.last().expect("non-empty");
        let t = (x_end - c[0]) / heading.cos();
        path.push([x_end, c[1] + t * heading.sin()]);
    }

    let mut b = PatternBuilder::new();
    b.add_polyline(&paths[0], Assignment::Border);
    b.add_polyline(&paths[rails - 1], Assignment::Border);
    b.add_segment(paths[0][0], paths[rails - 1][0], Assignment::Border);
    b.add_segment(*paths[0].last().expect("non-empty"), *paths[rails - 1].last().expect("non-empty"), Assignment::Border);
    for (r, path) in paths.iter().enumerate().take(rails - 1).skip(1) {
        b.add_polyline(path, parity_assignment(r));
    }
    for (points, acute_below) in &fold_lines {
        for r in 0..rails - 1 {
            // The segment on the acute side of each crossing carries the
            // pleat's sign, the other side the opposite one.
            let owner = if *acute_below { r + 1 } else { r };
            b.add_segment(points[r], points[r + 1], parity_assignment(owner));
        }
    }
    let pattern = b.build().map_err(|e| fail("emit".into(), e.to_string()))?;

    let mid = |pts: &[[f64; 2]]| {
        let (a, z) = (pts[0], pts[pts.len() - 1]);
        [0.5 * (a[0] + z[0]), 0.5 * (a[1] + z[1])]
    };
    let m0 = mid(&fold_lines[0].0);
    let m1 = mid(&fold_lines[line_count - 1].0);
    let interior = &paths[1..rails - 1];
    Ok(TiltedJoint {
        pattern,
        input_pleats: interior.iter().map(|path| [path[0], path[1]]).collect(),
        output_pleats: interior.iter().map(|path| [path[path.len() - 2], path[path.len() - 1]]).collect(),
        pleat_polylines: interior.to_vec(),
        axis_angle: (m1[1] - m0[1]).atan2(m1[0] - m0[0]),
    })
}

impl TiltedJoint {
    /// Angle between the mean input and mean output pleat directions.
    pub fn parallelism_error(&self) -> f64 {
        fn mean_direction(edges: &[[[f64; 2]; 2]]) -> [f64; 2] {
            let mut s = [0.0, 0.0];
            for [a, b] in edges {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = dx.hypot(dy);
                s[0] += dx / len;
                s[1] += dy / len;
            }
            s
        }
        let a = mean_direction(&self.input_pleats);
        let b = mean_direction(&self.output_pleats);
        cross(a, b).abs().atan2(a[0] * b[0] + a[1] * b[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::validate_flat_foldable;

    #[test]
    fn two_fold_joint_is_parallel_and_flat_foldable() {
        let t = gen_tilted_spring_joint(&TiltedJointParams::new(0.2, 1.0, 2, 0.5)).unwrap();
        assert!(t.parallelism_error() <= 1e-9);
        assert!(validate_flat_foldable(&t.pattern, 1e-9).passes());
        assert!(t.axis_angle.abs() > 1e-6);
    }

    #[test]
    fn large_ratio_fails_with_step() {
        let err = gen_tilted_spring_joint(&TiltedJointParams::new(2.0, 1.0, 4, 0.5)).unwrap_err();
        match err {
            GeneratorError::Construction { step, .. } => assert!(step.starts_with("fold line")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_fold_rejected() {
        assert!(matches!(
            gen_tilted_spring_joint(&TiltedJointParams::new(0.2, 1.0, 1, 0.5)),
            Err(GeneratorError::InvalidParams(_))
        ));
    }

    #[test]
    fn pleats_bend() {
        let t = gen_tilted_spring_joint(&TiltedJointParams::new(0.2, 1.0, 3, 0.5)).unwrap();
        let bent = t.pleat_polylines.iter().any(|path| {
            path.windows(3).any(|w| cross([w[1][0] - w[0][0], w[1][1] - w[0][1]], [w[2][0] - w[1][0], w[2][1] - w[1][1]]).abs() > 1e-9)
        });
        assert!(bent);
    }
}
