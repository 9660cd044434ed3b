use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{require_positive, GeneratorError, Result};
use crate::kinematics::{compound_fold_angle, sample_curve, KinematicCurve, SpringJointSpec};
use crate::pattern::{Assignment, CreasePattern, PatternBuilder};

/// Units per assembly: two mirrored pairs.
pub const MODULAR_UNIT_COUNT: usize = 4;

/// Gap between neighbouring units in the cut layout, as a fraction of the
/// unit width.
const PACKING_GAP: f64 = 0.1;

/// Minimal-layer spring joint: each polygon vertex of a unit's end stands in
/// for one reverse fold/pi-fold pair, with the vertex angle equal to the
/// reverse fold's start angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularJointSpec {
    pub vertex_angles: Vec<f64>,
    pub unit_length: f64,
    pub unit_width: f64,
    pub unit_count: usize,
}

impl ModularJointSpec {
    /// The spring joint the assembly replicates.
    pub fn joint(&self) -> SpringJointSpec {
        SpringJointSpec::new(self.vertex_angles.clone()).expect("vertex angles come from a valid joint")
    }

    pub fn predicted_fold_angle(&self, xi: f64) -> Result<f64> {
        Ok(compound_fold_angle(xi, &self.joint())?)
    }

    pub fn predicted_curve(&self, num_samples: usize) -> Result<KinematicCurve> {
        Ok(sample_curve(&self.joint(), num_samples)?)
    }
}

/// Parameters of a modular layout as read from a document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularParams {
    pub joint: SpringJointSpec,
    pub unit_length: f64,
    pub unit_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModularUnit {
    pub index: usize,
    /// Translation of the unit within the cut sheet.
    pub offset: [f64; 2],
    /// Units are assembled in mirrored pairs; a mirrored unit is reflected
    /// across its long axis.
    pub mirrored: bool,
    /// Whether the unit carries an open cut instead of a closed slit.
    pub open_cut: bool,
    /// Closed outline in sheet coordinates, counter-clockwise.
    pub outline: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModularLayout {
    pub spec: ModularJointSpec,
    pub units: Vec<ModularUnit>,
    /// Cut sheet: outlines and cuts are borders, hinges are unfolded creases.
    pub pattern: CreasePattern,
}

fn segments_touch(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    const EPS: f64 = 1e-12;
    (o1 * o2 <= EPS) && (o3 * o4 <= EPS) && {
        let overlap = |u: f64, v: f64, s: f64, t: f64| u.min(v) <= s.max(t) + EPS && s.min(t) <= u.max(v) + EPS;
        overlap(a[0], b[0], c[0], d[0]) && overlap(a[1], b[1], c[1], d[1])
    }
}

fn is_simple(polygon: &[[f64; 2]]) -> bool {
    let m = polygon.len();
    for i in 0..m {
        for j in i + 1..m {
            let adjacent = j == i + 1 || (i == 0 && j == m - 1);
            if adjacent {
                continue;
            }
            if segments_touch(polygon[i], polygon[(i + 1) % m], polygon[j], polygon[(j + 1) % m]) {
                return false;
            }
        }
    }
    true
}

/// Outline of one unit in local coordinates: a rectangle `[0, L] x [0, w]`
/// whose right end is replaced by a chain of `n + 1` equal edges turning by
/// `pi - theta_k` at each vertex. The chain's total turn is
/// `pi - compound_start`, laid out symmetrically about `+y` and scaled to span
/// the unit width. Returns the outline and the two chain ends.
fn unit_outline(angles: &[f64], length: f64, width: f64) -> Result<Vec<[f64; 2]>> {
    let start: f64 = angles.iter().skip(1).fold(angles[0], |acc, &a| acc - PI + a);
    let mut heading = 0.5 * start;
    let mut headings = vec![heading];
    for &theta in angles {
        heading += PI - theta;
        headings.push(heading);
    }
    let rise: f64 = headings.iter().map(|h| h.sin()).sum();
    if rise <= 1e-9 {
        return Err(GeneratorError::Geometry(format!(
            "polygonal end with start angle {start} does not span the unit width"
        )));
    }
    let edge = width / rise;
    let mut outline = vec![[0.0, 0.0], [length, 0.0]];
    let mut q = [length, 0.0];
    for (i, h) in headings.iter().enumerate() {
        q = [q[0] + edge * h.cos(), q[1] + edge * h.sin()];
        if i + 1 == headings.len() {
            q[1] = width;
        }
        outline.push(q);
    }
    outline.push([0.0, width]);
    if !is_simple(&outline) {
        return Err(GeneratorError::Geometry(format!(
            "polygonal end with start angle {start} makes the unit outline self-intersect"
        )));
    }
    Ok(outline)
}

fn layout(joint: &SpringJointSpec, unit_length: f64, unit_width: f64, open_cuts: [bool; MODULAR_UNIT_COUNT]) -> Result<ModularLayout> {
    require_positive("unit_length", unit_length)?;
    require_positive("unit_width", unit_width)?;
    let (l, w) = (unit_length, unit_width);
    let spec = ModularJointSpec {
        vertex_angles: joint.constituents().to_vec(),
        unit_length: l,
        unit_width: w,
        unit_count: MODULAR_UNIT_COUNT,
    };
    let local = unit_outline(&spec.vertex_angles, l, w)?;
    let extent = local.iter().map(|p| p[0]).fold(l, f64::max);
    let chain_end = local[local.len() - 2];

    let mut b = PatternBuilder::new();
    let mut units = Vec::with_capacity(MODULAR_UNIT_COUNT);
    for (index, &open_cut) in open_cuts.iter().enumerate() {
        let mirrored = index % 2 == 1;
        let dx = index as f64 * (extent + PACKING_GAP * w);
        let place = |p: [f64; 2]| {
            let y = if mirrored { w - p[1] } else { p[1] };
            [p[0] + dx, y]
        };
        let mut outline: Vec<[f64; 2]> = local.iter().map(|&p| place(p)).collect();
        if mirrored {
            outline.reverse();
        }
        let mut closed = outline.clone();
        closed.push(outline[0]);
        b.add_polyline(&closed, Assignment::Border);
        // Hinge joining the polygonal end to the body.
        b.add_segment(place([l, 0.0]), place(chain_end), Assignment::Flat);
        let cut_start = if open_cut { 0.0 } else { 0.25 * l };
        b.add_segment(place([cut_start, 0.5 * w]), place([0.75 * l, 0.5 * w]), Assignment::Border);
        units.push(ModularUnit { index, offset: [dx, 0.0], mirrored, open_cut, outline });
    }
    Ok(ModularLayout { spec, units, pattern: b.build()? })
}

/// Cut layout for the minimal-layer spring joint: four units with polygonal
/// ends whose vertex angles are the joint's constituent angles in order, a
/// hinge line where the end meets the body, and a closed slit in each body.
pub fn gen_modular_units(joint: &SpringJointSpec, unit_length: f64, unit_width: f64) -> Result<ModularLayout> {
    layout(joint, unit_length, unit_width, [false; MODULAR_UNIT_COUNT])
}

/// Asymmetric variant replicating a tilted axis: every other unit carries an
/// open cut reaching its straight end in place of the closed slit. Its
/// kinematics are not modelled.
pub fn gen_tilted_modular_units(joint: &SpringJointSpec, unit_length: f64, unit_width: f64) -> Result<ModularLayout> {
    if joint.len() < 2 {
        return Err(GeneratorError::InvalidParams(
            "the tilted modular variant needs at least two reverse folds".into(),
        ));
    }
    layout(joint, unit_length, unit_width, [false, true, false, true])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_angles_follow_constituents() {
        let joint = SpringJointSpec::equal(4, 0.75 * PI).unwrap();
        let layout = gen_modular_units(&joint, 4.0, 1.0).unwrap();
        assert_eq!(layout.spec.vertex_angles, vec![0.75 * PI; 4]);
        assert_eq!(layout.units.len(), MODULAR_UNIT_COUNT);
    }

    #[test]
    fn semicircular_end_has_equal_edges() {
        let joint = SpringJointSpec::equal(4, 0.75 * PI).unwrap();
        let outline = unit_outline(joint.constituents(), 4.0, 1.0).unwrap();
        let chain = &outline[1..outline.len() - 1];
        let lengths: Vec<f64> = chain.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).collect();
        assert_eq!(lengths.len(), 5);
        for len in &lengths {
            assert!((len - lengths[0]).abs() < 1e-12);
        }
        assert!((chain[chain.len() - 1][0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn overcurled_end_is_rejected() {
        let joint = SpringJointSpec::equal(8, 0.75 * PI).unwrap();
        assert!(matches!(gen_modular_units(&joint, 4.0, 1.0), Err(GeneratorError::Geometry(_))));
    }

    #[test]
    fn tilted_variant_alternates_cuts() {
        let joint = SpringJointSpec::equal(2, 2.5).unwrap();
        let layout = gen_tilted_modular_units(&joint, 4.0, 1.0).unwrap();
        let flags: Vec<bool> = layout.units.iter().map(|u| u.open_cut).collect();
        assert_eq!(flags, vec![false, true, false, true]);
        assert!(gen_tilted_modular_units(&SpringJointSpec::new(vec![2.0]).unwrap(), 4.0, 1.0).is_err());
    }
}
