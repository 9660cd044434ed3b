//! Planar crease patterns with local flat-foldability checks and the
//! reflection-composition flat-fold map.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod builder;
mod faces;
mod flat_fold;
pub mod fold_format;
pub mod svg;

pub use builder::PatternBuilder;
pub use faces::Face;
pub use flat_fold::{flat_fold_map, Affine2, FlatFoldMap};
pub use fold_format::{from_fold_json, to_fold_json, FoldDocument};
pub use svg::{to_svg, SvgStyle};

/// Incidence, defect and cycle-consistency tolerance, in model units and
/// radians.
pub const GEOMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("vertex {0} has non-finite coordinates")]
    NonFiniteVertex(usize),
    #[error("crease {crease} references missing vertex {vertex}")]
    MissingVertex { crease: usize, vertex: usize },
    #[error("crease {0} has zero length")]
    ZeroLength(usize),
    #[error("creases {0} and {1} join the same vertices")]
    DuplicateCrease(usize, usize),
    #[error("creases {0} and {1} cross away from a shared vertex")]
    Crossing(usize, usize),
    #[error("vertex {vertex} lies on the interior of crease {crease}")]
    VertexOnCrease { vertex: usize, crease: usize },
    #[error("crease {crease} has fold angle {angle} inconsistent with its assignment")]
    FoldAngleMismatch { crease: usize, angle: f64 },
    #[error("vertex {0} is out of range")]
    VertexIndex(usize),
    #[error("vertex {0} is on the boundary")]
    BoundaryVertex(usize),
    #[error("vertex {vertex} has odd degree {degree}")]
    OddDegree { vertex: usize, degree: usize },
    #[error("face {0} is out of range")]
    FaceIndex(usize),
    #[error("pattern has no faces")]
    NoFaces,
    #[error("flat-fold map is inconsistent around the cycle through faces {faces:?} (crease {crease}, deviation {deviation:e})")]
    InconsistentCycle { crease: usize, faces: Vec<usize>, deviation: f64 },
    #[error("conflicting assignments for the segment between vertices {0} and {1}")]
    ConflictingSegment(usize, usize),
    #[error("malformed FOLD document: {0}")]
    Fold(String),
}

pub type Result<T, E = PatternError> = std::result::Result<T, E>;

/// Crease assignment, matching the FOLD letters `M`, `V`, `B`, `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Assignment {
    Mountain,
    Valley,
    Border,
    Flat,
}

impl Assignment {
    pub fn letter(self) -> char {
        match self {
            Assignment::Mountain => 'M',
            Assignment::Valley => 'V',
            Assignment::Border => 'B',
            Assignment::Flat => 'F',
        }
    }

    pub fn from_letter(letter: &str) -> Option<Self> {
        match letter {
            "M" => Some(Assignment::Mountain),
            "V" => Some(Assignment::Valley),
            "B" => Some(Assignment::Border),
            "F" => Some(Assignment::Flat),
            _ => None,
        }
    }

    /// Whether the crease actually folds.
    pub fn is_fold(self) -> bool {
        matches!(self, Assignment::Mountain | Assignment::Valley)
    }

    /// Target angle of the fully flat-folded state: `-pi` for mountains,
    /// `pi` for valleys, `0` otherwise.
    pub fn flat_folded_angle(self) -> f64 {
        match self {
            Assignment::Mountain => -PI,
            Assignment::Valley => PI,
            _ => 0.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Assignment::Mountain => Assignment::Valley,
            Assignment::Valley => Assignment::Mountain,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crease {
    pub vertices: [usize; 2],
    pub assignment: Assignment,
    /// Target fold angle in radians, valley positive.
    pub fold_angle: f64,
}

impl Crease {
    pub fn new(a: usize, b: usize, assignment: Assignment) -> Self {
        Crease { vertices: [a, b], assignment, fold_angle: assignment.flat_folded_angle() }
    }
}

/// A validated planar straight-line graph of creases.
#[derive(Debug, Clone, PartialEq)]
pub struct CreasePattern {
    vertices: Vec<[f64; 2]>,
    creases: Vec<Crease>,
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// Distance from `p` to segment `ab` and whether its projection falls
/// strictly inside the segment.
pub(crate) fn point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> (f64, bool) {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2;
    let q = [a[0] + t * dx, a[1] + t * dy];
    let inside = t > 0.0 && t < 1.0;
    (dist(p, q), inside)
}

impl CreasePattern {
    /// Builds a pattern, checking that it is a planar straight-line graph
    /// (creases meet only at shared vertices) with sign-consistent fold angles.
    pub fn new(vertices: Vec<[f64; 2]>, creases: Vec<Crease>) -> Result<Self> {
        for (i, v) in vertices.iter().enumerate() {
            if !(v[0].is_finite() && v[1].is_finite()) {
                return Err(PatternError::NonFiniteVertex(i));
            }
        }
        for (i, c) in creases.iter().enumerate() {
            for &v in &c.vertices {
                if v >= vertices.len() {
                    return Err(PatternError::MissingVertex { crease: i, vertex: v });
                }
            }
            let [a, b] = c.vertices;
            if a == b || dist(vertices[a], vertices[b]) <= GEOMETRY_TOLERANCE {
                return Err(PatternError::ZeroLength(i));
            }
            let ok = match c.assignment {
                Assignment::Mountain => c.fold_angle < 0.0 && c.fold_angle >= -PI,
                Assignment::Valley => c.fold_angle > 0.0 && c.fold_angle <= PI,
                Assignment::Border | Assignment::Flat => c.fold_angle == 0.0,
            };
            if !ok {
                return Err(PatternError::FoldAngleMismatch { crease: i, angle: c.fold_angle });
            }
        }
        let cp = CreasePattern { vertices, creases };
        cp.check_planar()?;
        Ok(cp)
    }

    fn check_planar(&self) -> Result<()> {
        let segs: Vec<([f64; 2], [f64; 2])> =
            self.creases.iter().map(|c| (self.vertices[c.vertices[0]], self.vertices[c.vertices[1]])).collect();
        let min_x = |i: usize| segs[i].0[0].min(segs[i].1[0]);
        let max_x = |i: usize| segs[i].0[0].max(segs[i].1[0]);

        let mut order: Vec<usize> = (0..segs.len()).collect();
        order.sort_by(|&a, &b| min_x(a).total_cmp(&min_x(b)).then(a.cmp(&b)));
        for (pos, &i) in order.iter().enumerate() {
            let (a, b) = segs[i];
            let (ymin, ymax) = (a[1].min(b[1]), a[1].max(b[1]));
            for &j in &order[pos + 1..] {
                if min_x(j) > max_x(i) + GEOMETRY_TOLERANCE {
                    break;
                }
                let (c, d) = segs[j];
                if c[1].min(d[1]) > ymax + GEOMETRY_TOLERANCE || c[1].max(d[1]) < ymin - GEOMETRY_TOLERANCE {
                    continue;
                }
                let (ci, cj) = (self.creases[i].vertices, self.creases[j].vertices);
                let mut ends_i = ci;
                ends_i.sort_unstable();
                let mut ends_j = cj;
                ends_j.sort_unstable();
                if ends_i == ends_j {
                    return Err(PatternError::DuplicateCrease(i.min(j), i.max(j)));
                }
                let shared = ci.iter().any(|v| cj.contains(v));
                if !shared {
                    let o1 = orient(a, b, c);
                    let o2 = orient(a, b, d);
                    let o3 = orient(c, d, a);
                    let o4 = orient(c, d, b);
                    let scale_ab = dist(a, b);
                    let scale_cd = dist(c, d);
                    let strict = |x: f64, s: f64| x.abs() > GEOMETRY_TOLERANCE * s;
                    if strict(o1, scale_ab)
                        && strict(o2, scale_ab)
                        && strict(o3, scale_cd)
                        && strict(o4, scale_cd)
                        && (o1 > 0.0) != (o2 > 0.0)
                        && (o3 > 0.0) != (o4 > 0.0)
                    {
                        return Err(PatternError::Crossing(i.min(j), i.max(j)));
                    }
                }
                // An endpoint of one crease lying inside the other.
                for (&v, (p, q), other) in [
                    (&cj[0], (a, b), i),
                    (&cj[1], (a, b), i),
                    (&ci[0], (c, d), j),
                    (&ci[1], (c, d), j),
                ] {
                    let owner = self.creases[other].vertices;
                    if owner.contains(&v) {
                        continue;
                    }
                    let (distance, inside) = point_segment(self.vertices[v], p, q);
                    if inside && distance <= GEOMETRY_TOLERANCE {
                        return Err(PatternError::VertexOnCrease { vertex: v, crease: other });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn creases(&self) -> &[Crease] {
        &self.creases
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn crease_count(&self) -> usize {
        self.creases.len()
    }

    /// Indices of creases incident to `vertex`, in crease order.
    pub fn incident_creases(&self, vertex: usize) -> Vec<usize> {
        self.creases
            .iter()
            .enumerate()
            .filter(|(_, c)| c.vertices.contains(&vertex))
            .map(|(i, _)| i)
            .collect()
    }

    /// Direction of crease `crease` leaving `vertex`.
    fn direction_from(&self, crease: usize, vertex: usize) -> f64 {
        let [a, b] = self.creases[crease].vertices;
        let other = if a == vertex { b } else { a };
        let (p, q) = (self.vertices[vertex], self.vertices[other]);
        (q[1] - p[1]).atan2(q[0] - p[0])
    }

    /// A vertex is interior when no border crease touches it and it carries at
    /// least one fold.
    pub fn is_interior(&self, vertex: usize) -> bool {
        let incident = self.incident_creases(vertex);
        incident.iter().all(|&c| self.creases[c].assignment != Assignment::Border)
            && incident.iter().any(|&c| self.creases[c].assignment.is_fold())
    }

    fn folds_at(&self, vertex: usize) -> Result<Vec<usize>> {
        if vertex >= self.vertices.len() {
            return Err(PatternError::VertexIndex(vertex));
        }
        if !self.is_interior(vertex) {
            return Err(PatternError::BoundaryVertex(vertex));
        }
        Ok(self
            .incident_creases(vertex)
            .into_iter()
            .filter(|&c| self.creases[c].assignment.is_fold())
            .collect())
    }

    /// Sector angles between consecutive folds around `vertex`,
    /// counter-clockwise, starting at the fold with the lowest crease index.
    /// Unfolded (`F`) creases do not split sectors.
    pub fn sector_angles(&self, vertex: usize) -> Result<Vec<f64>> {
        let folds = self.folds_at(vertex)?;
        let mut dirs: Vec<(f64, usize)> = folds.iter().map(|&c| (self.direction_from(c, vertex), c)).collect();
        dirs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let start = dirs.iter().position(|&(_, c)| c == folds[0]).expect("first fold is present");
        dirs.rotate_left(start);
        let m = dirs.len();
        let sectors: Vec<f64> = (0..m)
            .map(|i| {
                let s = dirs[(i + 1) % m].0 - dirs[i].0;
                if s <= 0.0 {
                    s + 2.0 * PI
                } else {
                    s
                }
            })
            .collect();
        debug_assert!(
            (sectors.iter().sum::<f64>() - 2.0 * PI).abs() <= 1e-9,
            "sectors at vertex {vertex} do not close"
        );
        Ok(sectors)
    }
}

/// Alternating sector sum (odd minus even) around an interior vertex.
pub fn kawasaki_defect(cp: &CreasePattern, vertex: usize) -> Result<f64> {
    let sectors = cp.sector_angles(vertex)?;
    if sectors.len() % 2 == 1 {
        return Err(PatternError::OddDegree { vertex, degree: sectors.len() });
    }
    let (mut odd, mut even) = (0.0, 0.0);
    for (i, s) in sectors.iter().enumerate() {
        if i % 2 == 1 {
            odd += s;
        } else {
            even += s;
        }
    }
    Ok(odd - even)
}

/// Mountain count minus valley count at an interior vertex.
pub fn maekawa_balance(cp: &CreasePattern, vertex: usize) -> Result<i32> {
    let folds = cp.folds_at(vertex)?;
    Ok(folds
        .iter()
        .map(|&c| match cp.creases[c].assignment {
            Assignment::Mountain => 1,
            Assignment::Valley => -1,
            _ => 0,
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexReport {
    pub vertex: usize,
    pub interior: bool,
    /// Number of folds (mountain or valley creases) at the vertex.
    pub degree: usize,
    /// `NaN` for odd-degree vertices, where the defect is undefined.
    pub kawasaki_defect: f64,
    pub maekawa_balance: i32,
    pub flat_foldable: bool,
}

/// Per-vertex flat-foldability reports for a whole pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub vertices: Vec<VertexReport>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.vertices.iter().all(|r| r.flat_foldable)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VertexReport> {
        self.vertices.iter().filter(|r| !r.flat_foldable)
    }
}

/// Checks Kawasaki, Maekawa and even degree at every interior vertex.
pub fn validate_flat_foldable(cp: &CreasePattern, tol: f64) -> ValidationReport {
    let vertices = (0..cp.vertex_count())
        .filter(|&v| cp.is_interior(v))
        .map(|v| {
            let degree = cp.folds_at(v).map(|f| f.len()).unwrap_or(0);
            let defect = kawasaki_defect(cp, v).unwrap_or(f64::NAN);
            let balance = maekawa_balance(cp, v).unwrap_or(0);
            let flat_foldable = degree.is_multiple_of(2) && defect.abs() <= tol && balance.abs() == 2;
            VertexReport {
                vertex: v,
                interior: true,
                degree,
                kawasaki_defect: defect,
                maekawa_balance: balance,
                flat_foldable,
            }
        })
        .collect();
    ValidationReport { tolerance: tol, vertices }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A single interior vertex with creases at the given directions, each
    /// ending on a surrounding square border.
    pub(crate) fn star(directions: &[f64], assignments: &[Assignment]) -> CreasePattern {
        let mut b = PatternBuilder::new();
        let r = 1.0;
        for (&t, &a) in directions.iter().zip(assignments) {
            let (c, s) = (t.cos(), t.sin());
            let scale = r / c.abs().max(s.abs());
            b.add_segment([0.0, 0.0], [c * scale, s * scale], a);
        }
        b.add_polyline(&[[-r, -r], [r, -r], [r, r], [-r, r], [-r, -r]], Assignment::Border);
        b.build().unwrap()
    }

    fn center(cp: &CreasePattern) -> usize {
        cp.vertices().iter().position(|v| v[0] == 0.0 && v[1] == 0.0).unwrap()
    }

    use Assignment::{Mountain as M, Valley as V};

    #[test]
    fn symmetric_cross_has_zero_defect() {
        let cp = star(&[0.0, PI / 2.0, PI, 1.5 * PI], &[M, M, M, V]);
        assert!(kawasaki_defect(&cp, center(&cp)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn paired_sectors_have_zero_defect() {
        // Sectors (pi/3, pi/3, 2pi/3, 2pi/3): alternate sums are pi and pi.
        let cp = star(&[0.0, PI / 3.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0], &[M, M, M, V]);
        assert!(kawasaki_defect(&cp, center(&cp)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn alternating_sectors_have_nonzero_defect() {
        // Sectors (pi/3, 2pi/3, pi/3, 2pi/3): alternate sums are 4pi/3 and 2pi/3.
        let cp = star(&[0.0, PI / 3.0, PI, 4.0 * PI / 3.0], &[M, M, M, V]);
        let defect = kawasaki_defect(&cp, center(&cp)).unwrap();
        assert!((defect.abs() - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!(!validate_flat_foldable(&cp, 1e-9).passes());
    }

    #[test]
    fn maekawa_counts() {
        let cp = star(&[0.0, PI / 2.0, PI, 1.5 * PI], &[M, M, M, V]);
        assert_eq!(maekawa_balance(&cp, center(&cp)).unwrap(), 2);
        let all = star(&[0.0, PI / 2.0, PI, 1.5 * PI], &[M, M, M, M]);
        assert_eq!(maekawa_balance(&all, center(&all)).unwrap(), 4);
        let report = validate_flat_foldable(&all, 1e-9);
        assert!(!report.passes());
    }

    #[test]
    fn boundary_vertex_rejected() {
        let cp = star(&[0.0, PI / 2.0, PI, 1.5 * PI], &[M, M, M, V]);
        let corner = cp.vertices().iter().position(|v| v[0] == 1.0 && v[1] == 1.0).unwrap();
        assert_eq!(kawasaki_defect(&cp, corner), Err(PatternError::BoundaryVertex(corner)));
        assert_eq!(maekawa_balance(&cp, corner), Err(PatternError::BoundaryVertex(corner)));
    }

    #[test]
    fn odd_degree_rejected() {
        let cp = star(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0], &[M, M, V]);
        let c = center(&cp);
        assert_eq!(kawasaki_defect(&cp, c), Err(PatternError::OddDegree { vertex: c, degree: 3 }));
        assert!(!validate_flat_foldable(&cp, 1e-9).passes());
    }

    #[test]
    fn rejects_crossings_and_bad_angles() {
        let v = vec![[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]];
        let crossing = CreasePattern::new(v.clone(), vec![Crease::new(0, 1, M), Crease::new(2, 3, V)]);
        assert_eq!(crossing, Err(PatternError::Crossing(0, 1)));
        let bad = Crease { vertices: [0, 1], assignment: M, fold_angle: 1.0 };
        assert!(matches!(
            CreasePattern::new(v.clone(), vec![bad]),
            Err(PatternError::FoldAngleMismatch { .. })
        ));
        assert_eq!(
            CreasePattern::new(v.clone(), vec![Crease::new(0, 0, M)]),
            Err(PatternError::ZeroLength(0))
        );
        let on = vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
        assert!(matches!(
            CreasePattern::new(on, vec![Crease::new(0, 1, M), Crease::new(2, 3, V)]),
            Err(PatternError::VertexOnCrease { vertex: 2, crease: 0 })
        ));
    }
}
