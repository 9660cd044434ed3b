//! Independent numerical oracles used to cross-check the closed-form
//! kinematics: rigid loop closure around a degree-4 vertex in 3D, and the
//! planar cross-section of a folded strip.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use thiserror::Error;

use crate::kinematics::{self, KinematicsError, SpringJointSpec};

/// Maximum Frobenius distance from the identity of an accepted closure.
pub const CLOSURE_TOLERANCE: f64 = 1e-10;

/// Bracket width at which the root search stops.
pub const ROOT_BRACKET: f64 = 1e-13;

/// Sector angles must sum to `2 pi` within this tolerance.
pub const SECTOR_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("sector angle {0} is outside (0, pi)")]
    SectorOutOfRange(f64),
    #[error("sector angles sum to {0}, expected 2 pi")]
    SectorSum(f64),
    #[error("driven angle {0} is outside (-pi, pi)")]
    DrivenOutOfRange(f64),
    #[error("crease index {0} is not in 0..4")]
    CreaseIndex(usize),
    #[error("no rigid configuration reaches driven angle {0}")]
    NoSolution(f64),
    #[error("loop closure did not converge, residual {residual:e}")]
    NonConvergence { residual: f64 },
    #[error("expected {expected} segment lengths, got {got}")]
    SegmentCount { expected: usize, got: usize },
    #[error("segment length {0} is not positive")]
    SegmentLength(f64),
    #[error("oracle grid needs at least one point per axis")]
    EmptyGrid,
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

pub type Result<T, E = OracleError> = std::result::Result<T, E>;

/// A degree-4 vertex described by its four sector angles in counter-clockwise
/// order. Sector `i` lies between crease `i` and crease `i + 1`; crease 0 points
/// along `+x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degree4Vertex {
    sectors: [f64; 4],
}

impl Degree4Vertex {
    pub fn new(sectors: [f64; 4]) -> Result<Self> {
        for &s in &sectors {
            if !s.is_finite() || s <= 0.0 || s >= PI {
                return Err(OracleError::SectorOutOfRange(s));
            }
        }
        let sum: f64 = sectors.iter().sum();
        if (sum - 2.0 * PI).abs() > SECTOR_SUM_TOLERANCE {
            return Err(OracleError::SectorSum(sum));
        }
        Ok(Degree4Vertex { sectors })
    }

    /// The isotropic reverse-fold vertex for starting angle `phi0`.
    ///
    /// Creases 0 and 2 are the two halves of the pleat (collinear, along `+x`
    /// and `-x`), creases 1 and 3 are the reverse-fold creases at `+-phi0/2`.
    pub fn reverse_fold(phi0: f64) -> Result<Self> {
        let g = 0.5 * phi0;
        Self::new([g, PI - g, PI - g, g])
    }

    pub fn sectors(&self) -> [f64; 4] {
        self.sectors
    }

    /// Crease directions as angles in the flat sheet.
    pub fn crease_directions(&self) -> [f64; 4] {
        let s = self.sectors;
        [0.0, s[0], s[0] + s[1], s[0] + s[1] + s[2]]
    }

    fn crease_axes(&self) -> [Vector3<f64>; 4] {
        self.crease_directions().map(|t| Vector3::new(t.cos(), t.sin(), 0.0))
    }
}

/// Selects which rigid-folding branch the oracle reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The configuration with the smallest total `sum |rho_i|`.
    SmallestFold,
    /// Mountain/valley signs per crease (`-1`, `+1`, or `0` for either).
    Signs([i8; 4]),
}

/// A rigid configuration of a degree-4 vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopClosure {
    /// Fold angle of each crease (valley positive).
    pub fold_angles: [f64; 4],
    /// Frobenius distance of the composed rotation from the identity.
    pub residual: f64,
}

fn rot(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    Rotation3::from_axis_angle(&Unit::new_unchecked(*axis), angle).into_inner()
}

/// Signed angle about `axis` taking `a` to `b`, after projecting both onto the
/// plane normal to `axis`.
fn signed_angle(axis: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let pa = a - axis * axis.dot(a);
    let pb = b - axis * axis.dot(b);
    axis.dot(&pa.cross(&pb)).atan2(pa.dot(&pb))
}

/// Angle of a rotation matrix about a known unit axis.
fn rotation_angle_about(axis: &Vector3<f64>, m: &Matrix3<f64>) -> f64 {
    let vee = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]);
    (0.5 * axis.dot(&vee)).atan2(0.5 * (m.trace() - 1.0))
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= ROOT_BRACKET {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

fn wrap(t: f64) -> f64 {
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Candidate values of the fold angle on crease `d + 3` (the side crease
/// adjacent to the panel held fixed).
///
/// The closure condition reduces to `f(t) = 0` with `f` affine in
/// `(cos t, sin t)`. When `t = 0` is a root (the straight-fold branch through
/// a collinear crease pair) it is deflated exactly by `sin(t/2)`, leaving a
/// single sinusoid in `t/2` on `(0, 2 pi)`.
fn side_angle_candidates(f: impl Fn(f64) -> f64) -> Vec<f64> {
    const EDGE: f64 = 1e-9;
    const SCAN: usize = 720;
    let mut roots = Vec::new();
    if f(0.0).abs() <= 1e-14 {
        roots.push(0.0);
        let g = |t: f64| f(t) / (0.5 * t).sin();
        let (lo, hi) = (EDGE, 2.0 * PI - EDGE);
        if g(lo) * g(hi) < 0.0 {
            roots.push(wrap(bisect(g, lo, hi)));
        }
        return roots;
    }
    let step = 2.0 * PI / SCAN as f64;
    let mut prev_t = -PI;
    let mut prev_f = f(prev_t);
    for i in 1..=SCAN {
        let t = -PI + step * i as f64;
        let ft = f(t);
        if prev_f * ft <= 0.0 && !(prev_f == 0.0 && i > 1) {
            roots.push(wrap(bisect(&f, prev_t, t)));
        }
        prev_t = t;
        prev_f = ft;
    }
    roots
}

/// Solves the rigid configuration of `vertex` with crease `driven_index` held
/// at `driven_angle`, choosing the configuration with the smallest total fold.
pub fn vertex_loop_closure(
    vertex: &Degree4Vertex,
    driven_angle: f64,
    driven_index: usize,
) -> Result<LoopClosure> {
    vertex_loop_closure_on_branch(vertex, driven_angle, driven_index, Branch::SmallestFold)
}

/// Like [`vertex_loop_closure`] but with an explicit branch selector.
pub fn vertex_loop_closure_on_branch(
    vertex: &Degree4Vertex,
    driven_angle: f64,
    driven_index: usize,
    branch: Branch,
) -> Result<LoopClosure> {
    if driven_index >= 4 {
        return Err(OracleError::CreaseIndex(driven_index));
    }
    if !driven_angle.is_finite() || driven_angle.abs() >= PI {
        return Err(OracleError::DrivenOutOfRange(driven_angle));
    }
    if driven_angle == 0.0 {
        return Ok(LoopClosure { fold_angles: [0.0; 4], residual: 0.0 });
    }

    let d = driven_index;
    let (i1, i2, i3) = ((d + 1) % 4, (d + 2) % 4, (d + 3) % 4);
    let e = vertex.crease_axes();
    let cos_alpha = e[i1].dot(&e[i2]);
    let t_d = rot(&e[d], driven_angle);
    let w1 = t_d * e[i1];
    let closure = |t: f64| (rot(&e[i3], -t) * e[i2]).dot(&w1) - cos_alpha;

    let mut best: Option<(LoopClosure, (usize, f64))> = None;
    let mut worst_residual = 0.0_f64;
    for t in side_angle_candidates(closure) {
        let q = t_d.transpose() * rot(&e[i3], -t);
        let rho1 = signed_angle(&e[i1], &e[i2], &(q * e[i2]));
        let rho2 = rotation_angle_about(&e[i2], &(rot(&e[i1], -rho1) * q));
        let mut rho = [0.0; 4];
        rho[d] = driven_angle;
        rho[i1] = rho1;
        rho[i2] = rho2;
        rho[i3] = t;
        let composed = rot(&e[0], rho[0]) * rot(&e[1], rho[1]) * rot(&e[2], rho[2]) * rot(&e[3], rho[3]);
        let residual = (composed - Matrix3::identity()).norm();
        if residual > CLOSURE_TOLERANCE {
            worst_residual = worst_residual.max(residual);
            continue;
        }
        let total: f64 = rho.iter().map(|r| r.abs()).sum();
        let mismatches = match branch {
            Branch::SmallestFold => 0,
            Branch::Signs(signs) => rho
                .iter()
                .zip(signs)
                .filter(|&(&r, s)| s != 0 && r * f64::from(s) <= 0.0)
                .count(),
        };
        let key = (mismatches, total);
        let better = match &best {
            None => true,
            Some((_, k)) => key.0 < k.0 || (key.0 == k.0 && key.1 < k.1),
        };
        if better {
            best = Some((LoopClosure { fold_angles: rho, residual }, key));
        }
    }
    match best {
        Some((solution, _)) => Ok(solution),
        None if worst_residual > 0.0 => Err(OracleError::NonConvergence { residual: worst_residual }),
        None => Err(OracleError::NoSolution(driven_angle)),
    }
}

/// Mountain/valley signs of the reverse-fold vertex: the pleat half on crease 2
/// is the driven valley, the other pleat half reverses to a mountain. The two
/// reverse-fold creases follow as valleys.
pub const REVERSE_FOLD_SIGNS: [i8; 4] = [-1, 0, 1, 0];

/// Reverse-fold angle computed by rigid loop closure instead of the closed
/// form. The pleat crease is driven to `pi - xi`; the result is the angle
/// between the strip axis on either side of the vertex.
pub fn oracle_reverse_fold_angle(xi: f64, phi0: f64) -> Result<f64> {
    let vertex = Degree4Vertex::reverse_fold(phi0)?;
    let closure = vertex_loop_closure_on_branch(&vertex, PI - xi, 2, Branch::Signs(REVERSE_FOLD_SIGNS))?;
    let e = vertex.crease_axes();
    let outgoing = rot(&e[1], -closure.fold_angles[1]) * e[0];
    let axis = Vector3::x();
    Ok(axis.cross(&outgoing).norm().atan2(axis.dot(&outgoing)))
}

/// One comparison point between the closed form and the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample {
    pub xi: f64,
    pub phi0: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid {
    pub samples: Vec<OracleSample>,
}

impl OracleGrid {
    pub fn max_abs_err(&self) -> f64 {
        self.samples.iter().map(|s| s.abs_err).fold(0.0, f64::max)
    }

    /// CSV with header `xi,phi0,phi_closed_form,phi_oracle,abs_err`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,phi0,phi_closed_form,phi_oracle,abs_err\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.xi, s.phi0, s.closed_form, s.oracle, s.abs_err
            );
        }
        out
    }
}

/// Compares the closed form with the oracle on a cell-centred grid over
/// `(0, pi) x (0, pi)`.
///
/// Cell centres avoid `xi = 0`, where the pleat crease is driven to exactly
/// `pi` and both folding branches meet.
pub fn oracle_grid(xi_points: usize, phi0_points: usize) -> Result<OracleGrid> {
    if xi_points == 0 || phi0_points == 0 {
        return Err(OracleError::EmptyGrid);
    }
    let mut samples = Vec::with_capacity(xi_points * phi0_points);
    for i in 0..xi_points {
        let xi = (i as f64 + 0.5) * PI / xi_points as f64;
        for j in 0..phi0_points {
            let phi0 = (j as f64 + 0.5) * PI / phi0_points as f64;
            let closed_form = kinematics::reverse_fold_angle(xi, phi0)?;
            let oracle = oracle_reverse_fold_angle(xi, phi0)?;
            samples.push(OracleSample { xi, phi0, closed_form, oracle, abs_err: (closed_form - oracle).abs() });
        }
    }
    Ok(OracleGrid { samples })
}

/// Planar cross-section of a folded strip through a spring joint.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedProfile {
    /// `2n + 1` polyline points, starting at the origin.
    pub points: Vec<[f64; 2]>,
    /// Direction of each of the `2n` segments; the first is `0`.
    pub directions: Vec<f64>,
    pub lengths: Vec<f64>,
}

impl FoldedProfile {
    /// Direction change from the first to the last segment.
    pub fn total_turn(&self) -> f64 {
        self.directions.last().copied().unwrap_or(0.0) - self.directions[0]
    }

    /// Length measured along the polyline.
    pub fn arc_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }

    /// First pair of non-adjacent segments that properly cross, if any.
    ///
    /// Collinear overlaps (the stacked layers of a flat-folded strip) are not
    /// crossings.
    pub fn first_collision(&self) -> Option<(usize, usize)> {
        let segs: Vec<_> = self.points.windows(2).map(|w| (w[0], w[1])).collect();
        for i in 0..segs.len() {
            for j in i + 2..segs.len() {
                if segments_cross(segs[i], segs[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn has_collision(&self) -> bool {
        self.first_collision().is_some()
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(s: ([f64; 2], [f64; 2]), t: ([f64; 2], [f64; 2])) -> bool {
    const EPS: f64 = 1e-12;
    orient(s.0, s.1, t.0) * orient(s.0, s.1, t.1) < -EPS
        && orient(t.0, t.1, s.0) * orient(t.0, t.1, s.1) < -EPS
}

/// Segment lengths for [`folded_profile`]: long lead-in and lead-out segments
/// around alternating short and shorter links, so that the polyline's first
/// collision coincides with the hard stop.
pub fn default_segment_lengths(n: usize) -> Vec<f64> {
    let n = n.max(1);
    let mut lengths = vec![10.0];
    lengths.extend((0..2 * n - 2).map(|i| if i % 2 == 0 { 1.0 } else { 0.8 }));
    lengths.push(10.0);
    lengths
}

/// Builds the strip cross-section at dihedral angle `xi`: each reverse fold
/// turns the strip axis by its fold angle, each pi-fold by `-pi`.
pub fn folded_profile(joint: &SpringJointSpec, xi: f64, segment_lengths: &[f64]) -> Result<FoldedProfile> {
    let n = joint.len();
    let expected = 2 * n;
    if segment_lengths.len() != expected {
        return Err(OracleError::SegmentCount { expected, got: segment_lengths.len() });
    }
    if let Some(&bad) = segment_lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(OracleError::SegmentLength(bad));
    }
    let mut turns = Vec::with_capacity(expected - 1);
    for (k, &phi0) in joint.constituents().iter().enumerate() {
        if k > 0 {
            turns.push(-PI);
        }
        turns.push(kinematics::reverse_fold_angle(xi, phi0)?);
    }
    let mut directions = Vec::with_capacity(expected);
    let mut points = vec![[0.0, 0.0]];
    let mut direction = 0.0;
    for (i, &len) in segment_lengths.iter().enumerate() {
        if i > 0 {
            direction += turns[i - 1];
        }
        directions.push(direction);
        let [x, y] = points[i];
        points.push([x + len * direction.cos(), y + len * direction.sin()]);
    }
    Ok(FoldedProfile { points, directions, lengths: segment_lengths.to_vec() })
}
