use std::collections::VecDeque;

use super::{Assignment, CreasePattern, Face, PatternError, Result};

/// A planar rigid map `p -> m p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2 {
    pub m: [[f64; 2]; 2],
    pub t: [f64; 2],
}

impl Affine2 {
    pub const IDENTITY: Affine2 = Affine2 { m: [[1.0, 0.0], [0.0, 1.0]], t: [0.0, 0.0] };

    /// Reflection across the line through `a` and `b`.
    pub fn reflection(a: [f64; 2], b: [f64; 2]) -> Affine2 {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        let (ux, uy) = (dx / len, dy / len);
        let m = [[2.0 * ux * ux - 1.0, 2.0 * ux * uy], [2.0 * ux * uy, 2.0 * uy * uy - 1.0]];
        let ma = [m[0][0] * a[0] + m[0][1] * a[1], m[1][0] * a[0] + m[1][1] * a[1]];
        Affine2 { m, t: [a[0] - ma[0], a[1] - ma[1]] }
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * p[0] + self.m[0][1] * p[1] + self.t[0],
            self.m[1][0] * p[0] + self.m[1][1] * p[1] + self.t[1],
        ]
    }

    /// Linear part applied to a direction.
    pub fn apply_vector(&self, v: [f64; 2]) -> [f64; 2] {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Affine2) -> Affine2 {
        let a = &self.m;
        let b = &other.m;
        let m = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        let t = self.apply(other.t);
        Affine2 { m, t }
    }

    /// Whether the map reverses orientation (the face is flipped over).
    pub fn is_reflection(&self) -> bool {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0] < 0.0
    }

    /// Largest entry-wise difference, translations scaled by `1 / extent`.
    pub fn deviation(&self, other: &Affine2, extent: f64) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
            d = d.max((self.t[i] - other.t[i]).abs() / extent);
        }
        d
    }
}

/// The flat-folded placement of every face.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatFoldMap {
    pub faces: Vec<Face>,
    pub transforms: Vec<Affine2>,
    /// Largest deviation seen on any cycle of the face adjacency graph.
    pub max_cycle_deviation: f64,
}

impl FlatFoldMap {
    /// Folded image of face `face`.
    pub fn folded_face(&self, face: usize, cp: &CreasePattern) -> Vec<[f64; 2]> {
        let t = &self.transforms[face];
        self.faces[face].vertices.iter().map(|&v| t.apply(cp.vertices()[v])).collect()
    }
}

/// Places every face in its flat-folded position by composing reflections
/// across the creases crossed on a breadth-first path from `seed_face`.
///
/// Mountain and valley creases reflect, unfolded creases carry the identity,
/// and borders are never crossed. Every other adjacency closes a cycle whose
/// composed map must agree within `tol`; translations are compared relative to
/// the pattern's extent. Each connected group of faces not reachable from the
/// seed is placed from its lowest-numbered face.
pub fn flat_fold_map(cp: &CreasePattern, seed_face: usize, tol: f64) -> Result<FlatFoldMap> {
    let graph = cp.face_graph();
    let faces = graph.faces;
    if faces.is_empty() {
        return Err(PatternError::NoFaces);
    }
    if seed_face >= faces.len() {
        return Err(PatternError::FaceIndex(seed_face));
    }
    let extent = {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in cp.vertices() {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1]).max(1.0)
    };

    // (neighbour, crease) pairs per face, over crossable creases only.
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); faces.len()];
    for (c, crease) in cp.creases().iter().enumerate() {
        if crease.assignment == Assignment::Border {
            continue;
        }
        if let (Some(f), Some(g)) = (graph.left_face[2 * c], graph.left_face[2 * c + 1]) {
            if f != g {
                adjacency[f].push((g, c));
                adjacency[g].push((f, c));
            }
        }
    }
    let crossing = |c: usize| {
        let crease = &cp.creases()[c];
        if crease.assignment.is_fold() {
            let [a, b] = crease.vertices;
            Affine2::reflection(cp.vertices()[a], cp.vertices()[b])
        } else {
            Affine2::IDENTITY
        }
    };

    let mut transforms: Vec<Option<Affine2>> = vec![None; faces.len()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; faces.len()];
    let mut max_dev: f64 = 0.0;
    let roots = std::iter::once(seed_face).chain(0..faces.len());
    for root in roots {
        if transforms[root].is_some() {
            continue;
        }
        transforms[root] = Some(Affine2::IDENTITY);
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            let tf = transforms[f].expect("queued faces are placed");
            for &(g, c) in &adjacency[f] {
                if parent[f].map(|(p, pc)| p == g && pc == c).unwrap_or(false) {
                    continue;
                }
                let expected = tf.compose(&crossing(c));
                match transforms[g] {
                    None => {
                        transforms[g] = Some(expected);
                        parent[g] = Some((f, c));
                        queue.push_back(g);
                    }
                    Some(existing) => {
                        let dev = existing.deviation(&expected, extent);
                        max_dev = max_dev.max(dev);
                        if dev > tol {
                            return Err(PatternError::InconsistentCycle {
                                crease: c,
                                faces: cycle_through(&parent, f, g),
                                deviation: dev,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(FlatFoldMap {
        faces,
        transforms: transforms.into_iter().map(|t| t.expect("every face is placed")).collect(),
        max_cycle_deviation: max_dev,
    })
}

fn path_to_root(parent: &[Option<(usize, usize)>], mut f: usize) -> Vec<usize> {
    let mut path = vec![f];
    while let Some((p, _)) = parent[f] {
        path.push(p);
        f = p;
    }
    path
}

/// Faces of the cycle closed by the adjacency `f`-`g`.
fn cycle_through(parent: &[Option<(usize, usize)>], f: usize, g: usize) -> Vec<usize> {
    let pf = path_to_root(parent, f);
    let pg = path_to_root(parent, g);
    let common = pf.iter().find(|x| pg.contains(x)).copied();
    let mut cycle: Vec<usize> = pf.iter().copied().take_while(|&x| Some(x) != common).collect();
    if let Some(c) = common {
        cycle.push(c);
    }
    let back: Vec<usize> = pg.iter().copied().take_while(|&x| Some(x) != common).collect();
    cycle.extend(back.into_iter().rev());
    cycle
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternBuilder;

    #[test]
    fn single_valley_mirrors_second_face() {
        let mut b = PatternBuilder::new();
        b.add_polyline(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0], [0.0, 0.0]], Assignment::Border);
        b.add_segment([1.0, 0.0], [1.0, 1.0], Assignment::Valley);
        let cp = b.build().unwrap();
        let map = flat_fold_map(&cp, 0, 1e-9).unwrap();
        assert_eq!(map.transforms.len(), 2);
        let flipped = map.transforms.iter().filter(|t| t.is_reflection()).count();
        assert_eq!(flipped, 1);
        for f in 0..2 {
            for p in map.folded_face(f, &cp) {
                let seed_side = cp.vertices()[map.faces[0].vertices[0]][0] <= 1.0;
                let on_side = if seed_side { p[0] <= 1.0 + 1e-12 } else { p[0] >= 1.0 - 1e-12 };
                assert!(on_side);
            }
        }
    }

    #[test]
    fn reflection_is_an_involution() {
        let r = Affine2::reflection([0.3, -1.2], [2.0, 0.7]);
        let twice = r.compose(&r);
        assert!(twice.deviation(&Affine2::IDENTITY, 1.0) < 1e-15);
    }

    #[test]
    fn inconsistent_vertex_is_reported() {
        let mut b = PatternBuilder::new();
        b.add_polyline(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]], Assignment::Border);
        b.add_segment([0.0, 0.0], [1.0, 0.0], Assignment::Mountain);
        b.add_segment([0.0, 0.0], [0.0, 1.0], Assignment::Mountain);
        b.add_segment([0.0, 0.0], [-1.0, 0.0], Assignment::Mountain);
        b.add_segment([0.0, 0.0], [1.0, -1.0], Assignment::Valley);
        let cp = b.build().unwrap();
        match flat_fold_map(&cp, 0, 1e-9) {
            Err(PatternError::InconsistentCycle { faces, .. }) => assert!(faces.len() >= 2),
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }
}
