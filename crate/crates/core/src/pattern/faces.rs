use super::CreasePattern;

/// A bounded face of the planar graph, traversed counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub vertices: Vec<usize>,
    /// Creases along the boundary, aligned with `vertices` (crease `i` joins
    /// vertex `i` to vertex `i + 1`).
    pub creases: Vec<usize>,
    pub area: f64,
}

/// Faces together with the face on the left of every half-edge. Half-edge
/// `2c` runs along crease `c` from its first to its second vertex, `2c + 1`
/// the other way.
#[derive(Debug, Clone)]
pub(crate) struct FaceGraph {
    pub faces: Vec<Face>,
    pub left_face: Vec<Option<usize>>,
}

/// Faces whose signed area is at or below this are unbounded or degenerate
/// walks and are dropped.
const MIN_FACE_AREA: f64 = 1e-12;

impl CreasePattern {
    pub(crate) fn face_graph(&self) -> FaceGraph {
        let vertices = self.vertices();
        let creases = self.creases();
        let half_count = 2 * creases.len();
        let tail = |h: usize| creases[h / 2].vertices[h % 2];
        let head = |h: usize| creases[h / 2].vertices[1 - h % 2];

        let mut outgoing: Vec<Vec<(f64, usize)>> = vec![Vec::new(); vertices.len()];
        for h in 0..half_count {
            let (p, q) = (vertices[tail(h)], vertices[head(h)]);
            outgoing[tail(h)].push(((q[1] - p[1]).atan2(q[0] - p[0]), h));
        }
        let mut position = vec![0usize; half_count];
        for list in &mut outgoing {
            list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for (i, &(_, h)) in list.iter().enumerate() {
                position[h] = i;
            }
        }
        let next = |h: usize| {
            let twin = h ^ 1;
            let list = &outgoing[head(h)];
            let i = position[twin];
            list[(i + list.len() - 1) % list.len()].1
        };

        let mut visited = vec![false; half_count];
        let mut left_face = vec![None; half_count];
        let mut faces = Vec::new();
        for start in 0..half_count {
            if visited[start] {
                continue;
            }
            let mut walk = Vec::new();
            let mut h = start;
            while !visited[h] {
                visited[h] = true;
                walk.push(h);
                h = next(h);
            }
            let area = 0.5
                * walk
                    .iter()
                    .map(|&h| {
                        let (p, q) = (vertices[tail(h)], vertices[head(h)]);
                        p[0] * q[1] - q[0] * p[1]
                    })
                    .sum::<f64>();
            if area > MIN_FACE_AREA {
                let id = faces.len();
                for &h in &walk {
                    left_face[h] = Some(id);
                }
                faces.push(Face {
                    vertices: walk.iter().map(|&h| tail(h)).collect(),
                    creases: walk.iter().map(|&h| h / 2).collect(),
                    area,
                });
            }
        }
        FaceGraph { faces, left_face }
    }

    /// Bounded faces of the pattern, derived by planar face traversal.
    pub fn faces(&self) -> Vec<Face> {
        self.face_graph().faces
    }
}

#[cfg(test)]
mod tests {
    use crate::pattern::{Assignment, PatternBuilder};

    #[test]
    fn rectangle_with_crease_has_two_faces() {
        let mut b = PatternBuilder::new();
        b.add_polyline(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0], [0.0, 0.0]], Assignment::Border);
        b.add_segment([1.0, 0.0], [1.0, 1.0], Assignment::Valley);
        let faces = b.build().unwrap().faces();
        assert_eq!(faces.len(), 2);
        for f in &faces {
            assert!((f.area - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dangling_slit_does_not_add_faces() {
        let mut b = PatternBuilder::new();
        b.add_polyline(&[[0.0, 0.0], [4.0, 0.0], [4.0, 1.0], [0.0, 1.0], [0.0, 0.0]], Assignment::Border);
        b.add_segment([1.0, 0.5], [3.0, 0.5], Assignment::Border);
        let faces = b.build().unwrap().faces();
        assert_eq!(faces.len(), 1);
        assert!((faces[0].area - 4.0).abs() < 1e-12);
    }
}
