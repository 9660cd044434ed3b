//! Closed-form forward kinematics of reverse folds and spring joints.
//!
//! Angles are plain `f64` radians. Dihedral angles `xi` are unsigned and run
//! from `0` (pleats fully folded) to `pi` (flat). Fold angles `phi` are signed
//! and are never wrapped, so a compound joint may legitimately report values
//! below `-pi`; [`find_hard_stop`] tells the caller where that happens.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Starting angles within this distance of `pi` are treated as pi-folds.
pub const PI_FOLD_TOLERANCE: f64 = 1e-12;

/// Bracket width at which the bisection solvers stop.
pub const BISECTION_TOLERANCE: f64 = 1e-12;

/// Inputs may overshoot their closed domain by this much before being rejected.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KinematicsError {
    #[error("dihedral angle {0} is outside [0, pi]")]
    DihedralOutOfRange(f64),
    #[error("starting fold angle {0} is outside [0, pi]")]
    StartAngleOutOfRange(f64),
    #[error("signed starting fold angle {0} is outside [-pi, pi]")]
    SignedStartAngleOutOfRange(f64),
    #[error("constituent angle {0} is outside (0, pi]")]
    ConstituentOutOfRange(f64),
    #[error("a spring joint needs at least one reverse fold")]
    EmptyJoint,
    #[error("envelope is unbounded at xi = pi when phi0_max = {0} < pi")]
    EnvelopeUnbounded(f64),
    #[error("target fold angle {target} is outside the reachable range [{min}, {max}]")]
    TargetOutOfRange { target: f64, min: f64, max: f64 },
    #[error("every constituent is a pi-fold, the curve is constant")]
    Degenerate,
    #[error("a curve needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
}

pub type Result<T, E = KinematicsError> = std::result::Result<T, E>;

fn check_dihedral(xi: f64) -> Result<f64> {
    if !(-DOMAIN_SLACK..=PI + DOMAIN_SLACK).contains(&xi) {
        return Err(KinematicsError::DihedralOutOfRange(xi));
    }
    Ok(xi.clamp(0.0, PI))
}

fn check_start(phi0: f64) -> Result<f64> {
    if !(-DOMAIN_SLACK..=PI + DOMAIN_SLACK).contains(&phi0) {
        return Err(KinematicsError::StartAngleOutOfRange(phi0));
    }
    Ok(phi0.clamp(0.0, PI))
}

fn is_pi_fold(phi0: f64) -> bool {
    (phi0 - PI).abs() <= PI_FOLD_TOLERANCE
}

/// Fold angle of a single isotropic reverse fold:
/// `phi = 2 atan(cos(xi/2) tan(phi0/2))`.
///
/// A starting angle of `pi` (a pi-fold) returns exactly `pi` for every `xi`.
pub fn reverse_fold_angle(xi: f64, phi0: f64) -> Result<f64> {
    let xi = check_dihedral(xi)?;
    let phi0 = check_start(phi0)?;
    Ok(unchecked_fold_angle(xi, phi0))
}

/// Reverse fold angle with the mountain/valley convention folded into the sign
/// of `phi0`. A negative `phi0` is the mirrored fold and yields the negated
/// angle of its positive twin.
pub fn signed_reverse_fold_angle(xi: f64, phi0: f64) -> Result<f64> {
    let xi = check_dihedral(xi)?;
    if !phi0.is_finite() || phi0.abs() > PI + DOMAIN_SLACK {
        return Err(KinematicsError::SignedStartAngleOutOfRange(phi0));
    }
    let magnitude = unchecked_fold_angle(xi, phi0.abs().min(PI));
    Ok(if phi0.is_sign_negative() { -magnitude } else { magnitude })
}

#[inline]
fn unchecked_fold_angle(xi: f64, phi0: f64) -> f64 {
    if is_pi_fold(phi0) {
        return PI;
    }
    2.0 * ((0.5 * xi).cos() * (0.5 * phi0).tan()).atan()
}

/// Derivative of [`reverse_fold_angle`] with respect to `phi0`.
///
/// Written as `c / (cos^2(phi0/2) + c^2 sin^2(phi0/2))` with `c = cos(xi/2)`,
/// which stays finite at `phi0 = pi`.
pub(crate) fn fold_angle_start_derivative(xi: f64, phi0: f64) -> f64 {
    let c = (0.5 * xi).cos();
    let (s, k) = (0.5 * phi0).sin_cos();
    c / (k * k + c * c * s * s)
}

/// The ordered starting angles of the reverse folds making up a spring joint.
///
/// Successive reverse folds are separated by opposite-sign pi-folds, so a joint
/// with `n` constituents contains `n - 1` pi-folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct SpringJointSpec {
    constituents: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawJoint {
    constituent_angles: Vec<f64>,
}

impl TryFrom<RawJoint> for SpringJointSpec {
    type Error = KinematicsError;

    fn try_from(raw: RawJoint) -> Result<Self> {
        SpringJointSpec::new(raw.constituent_angles)
    }
}

impl From<SpringJointSpec> for RawJoint {
    fn from(joint: SpringJointSpec) -> Self {
        RawJoint { constituent_angles: joint.constituents }
    }
}

impl SpringJointSpec {
    pub fn new(constituents: Vec<f64>) -> Result<Self> {
        if constituents.is_empty() {
            return Err(KinematicsError::EmptyJoint);
        }
        for &angle in &constituents {
            if !angle.is_finite() || angle <= 0.0 || angle > PI + DOMAIN_SLACK {
                return Err(KinematicsError::ConstituentOutOfRange(angle));
            }
        }
        let constituents = constituents.into_iter().map(|a| a.min(PI)).collect();
        Ok(SpringJointSpec { constituents })
    }

    /// `n` reverse folds sharing the same starting angle.
    pub fn equal(n: usize, phi0: f64) -> Result<Self> {
        Self::new(vec![phi0; n])
    }

    /// Equal-angle joint whose compound start angle is `phi0_max`; as `n`
    /// grows it converges to the envelope curve.
    pub fn envelope_family(n: usize, phi0_max: f64) -> Result<Self> {
        let phi0_max = check_start(phi0_max)?;
        Self::equal(n, PI - (PI - phi0_max) / n as f64)
    }

    pub fn constituents(&self) -> &[f64] {
        &self.constituents
    }

    /// Number of reverse folds.
    pub fn len(&self) -> usize {
        self.constituents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constituents.is_empty()
    }

    pub fn pi_fold_count(&self) -> usize {
        self.len() - 1
    }

    pub fn is_all_pi_folds(&self) -> bool {
        self.constituents.iter().all(|&a| is_pi_fold(a))
    }

    pub fn start_angle(&self) -> f64 {
        compound_start_angle(self)
    }

    pub fn fold_angle(&self, xi: f64) -> Result<f64> {
        compound_fold_angle(xi, self)
    }
}

/// `-pi (n - 1) + sum(phi0_k)`, accumulated one reverse fold/pi-fold pair at a
/// time so that the two-fold case evaluates exactly as `phi0_0 - pi + phi0_1`.
pub fn compound_start_angle(joint: &SpringJointSpec) -> f64 {
    let mut angles = joint.constituents.iter();
    let first = *angles.next().expect("joint is never empty");
    angles.fold(first, |acc, &phi0| acc - PI + phi0)
}

/// Fold angle of a spring joint at dihedral angle `xi`.
pub fn compound_fold_angle(xi: f64, joint: &SpringJointSpec) -> Result<f64> {
    let xi = check_dihedral(xi)?;
    Ok(compound_unchecked(xi, joint))
}

fn compound_unchecked(xi: f64, joint: &SpringJointSpec) -> f64 {
    let mut angles = joint.constituents.iter();
    let first = unchecked_fold_angle(xi, *angles.next().expect("joint is never empty"));
    angles.fold(first, |acc, &phi0| acc - PI + unchecked_fold_angle(xi, phi0))
}

/// Limit curve of spring joints with start angle `phi0_max` as the number of
/// constituents grows: `(phi0_max - pi) sec(xi/2) + pi`.
///
/// Every compound curve starting at `phi0_max` lies on or above this curve.
pub fn envelope_fold_angle(xi: f64, phi0_max: f64) -> Result<f64> {
    let xi = check_dihedral(xi)?;
    let phi0_max = check_start(phi0_max)?;
    if is_pi_fold(phi0_max) {
        return Ok(PI);
    }
    if xi >= PI {
        return Err(KinematicsError::EnvelopeUnbounded(phi0_max));
    }
    Ok((phi0_max - PI) / (0.5 * xi).cos() + PI)
}

/// Decreasing bisection on `[0, pi]`: returns the `xi` where `f` crosses zero.
/// Callers guarantee `f(0) >= 0 >= f(pi)`.
fn bisect_decreasing(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, PI);
    for _ in 0..200 {
        if hi - lo <= BISECTION_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Dihedral angle at which the joint reaches `phi_target`.
pub fn invert_dihedral(phi_target: f64, joint: &SpringJointSpec) -> Result<f64> {
    if joint.is_all_pi_folds() {
        return Err(KinematicsError::Degenerate);
    }
    let max = compound_start_angle(joint);
    let min = compound_unchecked(PI, joint);
    if !phi_target.is_finite()
        || phi_target > max + DOMAIN_SLACK
        || phi_target < min - DOMAIN_SLACK
    {
        return Err(KinematicsError::TargetOutOfRange { target: phi_target, min, max });
    }
    if phi_target >= max {
        return Ok(0.0);
    }
    if phi_target <= min {
        return Ok(PI);
    }
    Ok(bisect_decreasing(|xi| compound_unchecked(xi, joint) - phi_target))
}

/// Dihedral angle where the joint reaches `-pi` and the pleats collide.
///
/// `None` when the curve stays above `-pi` on all of `[0, pi]`, or when it
/// already starts below `-pi` (there is no crossing to report).
pub fn find_hard_stop(joint: &SpringJointSpec) -> Option<f64> {
    let start = compound_start_angle(joint);
    let end = compound_unchecked(PI, joint);
    if start < -PI || end > -PI {
        return None;
    }
    if start == -PI {
        return Some(0.0);
    }
    Some(bisect_decreasing(|xi| compound_unchecked(xi, joint) + PI))
}

/// A sampled `(xi, phi)` trajectory of a joint.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicCurve {
    pub joint: SpringJointSpec,
    pub samples: Vec<(f64, f64)>,
}

impl KinematicCurve {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV with header `xi,phi`, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,phi\n");
        for &(xi, phi) in &self.samples {
            let _ = writeln!(out, "{xi:.16e},{phi:.16e}");
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut writer: W) -> io::Result<()> {
        writer.write_all(self.to_csv().as_bytes())
    }
}

/// Samples the joint on a uniform grid of `num_samples` points over `[0, pi]`.
pub fn sample_curve(joint: &SpringJointSpec, num_samples: usize) -> Result<KinematicCurve> {
    if num_samples < 2 {
        return Err(KinematicsError::TooFewSamples(num_samples));
    }
    let last = (num_samples - 1) as f64;
    let samples = (0..num_samples)
        .map(|i| {
            let xi = if i + 1 == num_samples { PI } else { PI * i as f64 / last };
            (xi, compound_unchecked(xi, joint))
        })
        .collect();
    Ok(KinematicCurve { joint: joint.clone(), samples })
}

/// Deployment regimes of a corrugation whose reverse folds are replaced by
/// `joint`: deploying with a negative Poisson's ratio while `phi > 0`,
/// collapsing with a positive one while `-pi < phi < 0`, collided past the
/// hard stop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub start_angle: f64,
    /// Dihedral angle of maximum deployment (`phi = 0`).
    pub zero_crossing: Option<f64>,
    pub hard_stop: Option<f64>,
    /// Sign changes of `phi` observed on the sampling grid.
    pub sign_changes: usize,
}

pub fn regime_analysis(joint: &SpringJointSpec, num_samples: usize) -> Result<RegimeReport> {
    let curve = sample_curve(joint, num_samples)?;
    let zero_crossing = invert_dihedral(0.0, joint).ok();
    let sign_changes = curve
        .samples
        .windows(2)
        .filter(|w| (w[0].1 > 0.0 && w[1].1 <= 0.0) || (w[0].1 <= 0.0 && w[1].1 > 0.0))
        .count();
    Ok(RegimeReport {
        start_angle: compound_start_angle(joint),
        zero_crossing,
        hard_stop: find_hard_stop(joint),
        sign_changes,
    })
}
