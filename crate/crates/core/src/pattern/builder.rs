use std::collections::{BTreeMap, HashMap};

use super::{point_segment, Assignment, Crease, CreasePattern, PatternError, Result, GEOMETRY_TOLERANCE};

/// Incremental construction of a crease pattern from segments.
///
/// Points closer than [`GEOMETRY_TOLERANCE`] are merged, and every segment is
/// split at any vertex lying on it, so callers can add long lines and let
/// T-junctions resolve themselves. Crossing segments are not split; the
/// caller must place intersection points explicitly.
#[derive(Debug, Default, Clone)]
pub struct PatternBuilder {
    vertices: Vec<[f64; 2]>,
    grid: HashMap<(i64, i64), Vec<usize>>,
    segments: Vec<(usize, usize, Assignment)>,
}

const CELL: f64 = 1e-6;

fn cell_of(p: [f64; 2]) -> (i64, i64) {
    ((p[0] / CELL).floor() as i64, (p[1] / CELL).floor() as i64)
}

impl PatternBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the index of the vertex at `p`, adding it if no existing vertex
    /// lies within tolerance.
    pub fn add_vertex(&mut self, p: [f64; 2]) -> usize {
        let (cx, cy) = cell_of(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(cx + dx, cy + dy)) {
                    for &id in ids {
                        let q = self.vertices[id];
                        if (q[0] - p[0]).hypot(q[1] - p[1]) <= GEOMETRY_TOLERANCE {
                            return id;
                        }
                    }
                }
            }
        }
        let id = self.vertices.len();
        self.vertices.push(p);
        self.grid.entry((cx, cy)).or_default().push(id);
        id
    }

    pub fn add_segment(&mut self, p: [f64; 2], q: [f64; 2], assignment: Assignment) {
        let a = self.add_vertex(p);
        let b = self.add_vertex(q);
        if a != b {
            self.segments.push((a, b, assignment));
        }
    }

    pub fn add_polyline(&mut self, points: &[[f64; 2]], assignment: Assignment) {
        for w in points.windows(2) {
            self.add_segment(w[0], w[1], assignment);
        }
    }

    pub fn vertex(&self, index: usize) -> [f64; 2] {
        self.vertices[index]
    }

    /// Splits segments at interior vertices, merges duplicates and validates.
    pub fn build(self) -> Result<CreasePattern> {
        let mut by_x: Vec<usize> = (0..self.vertices.len()).collect();
        by_x.sort_by(|&a, &b| self.vertices[a][0].total_cmp(&self.vertices[b][0]));
        let xs: Vec<f64> = by_x.iter().map(|&i| self.vertices[i][0]).collect();

        let mut edges: BTreeMap<(usize, usize), Assignment> = BTreeMap::new();
        for &(a, b, assignment) in &self.segments {
            let (p, q) = (self.vertices[a], self.vertices[b]);
            let lo = xs.partition_point(|&x| x < p[0].min(q[0]) - GEOMETRY_TOLERANCE);
            let hi = xs.partition_point(|&x| x <= p[0].max(q[0]) + GEOMETRY_TOLERANCE);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let len2 = dx * dx + dy * dy;
            let mut on: Vec<(f64, usize)> = by_x[lo..hi]
                .iter()
                .filter(|&&v| v != a && v != b)
                .filter_map(|&v| {
                    let r = self.vertices[v];
                    let (d, inside) = point_segment(r, p, q);
                    (inside && d <= GEOMETRY_TOLERANCE)
                        .then(|| (((r[0] - p[0]) * dx + (r[1] - p[1]) * dy) / len2, v))
                })
                .collect();
            on.sort_by(|x, y| x.0.total_cmp(&y.0));
            let chain: Vec<usize> = std::iter::once(a).chain(on.into_iter().map(|(_, v)| v)).chain([b]).collect();
            for w in chain.windows(2) {
                let key = (w[0].min(w[1]), w[0].max(w[1]));
                match edges.get(&key) {
                    Some(&existing) if existing != assignment => {
                        return Err(PatternError::ConflictingSegment(key.0, key.1));
                    }
                    _ => {
                        edges.insert(key, assignment);
                    }
                }
            }
        }
        let creases = edges.into_iter().map(|((a, b), assignment)| Crease::new(a, b, assignment)).collect();
        CreasePattern::new(self.vertices, creases)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_splits() {
        let mut b = PatternBuilder::new();
        b.add_segment([0.0, 0.0], [2.0, 0.0], Assignment::Border);
        b.add_segment([1.0, 1e-12], [1.0, 1.0], Assignment::Valley);
        let cp = b.build().unwrap();
        assert_eq!(cp.vertex_count(), 4);
        assert_eq!(cp.crease_count(), 3);
    }

    #[test]
    fn conflicting_duplicate_rejected() {
        let mut b = PatternBuilder::new();
        b.add_segment([0.0, 0.0], [1.0, 0.0], Assignment::Valley);
        b.add_segment([1.0, 0.0], [0.0, 0.0], Assignment::Mountain);
        assert!(matches!(b.build(), Err(PatternError::ConflictingSegment(0, 1))));
    }
}
