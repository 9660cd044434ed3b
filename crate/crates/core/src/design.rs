//! Inverse design: choose constituent starting angles so that a spring joint's
//! kinematic curve passes through prescribed `(xi, phi)` waypoints.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{
    compound_fold_angle, envelope_fold_angle, fold_angle_start_derivative, reverse_fold_angle,
    SpringJointSpec,
};

/// Two waypoints closer than this in `xi` are duplicates.
pub const DUPLICATE_XI_TOLERANCE: f64 = 1e-9;

/// Slack allowed when comparing a waypoint against the feasible region.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// The solver stops once the residual norm changes by less than this.
pub const STALL_TOLERANCE: f64 = 1e-10;

/// Maximum number of step halvings per iteration.
pub const MAX_STEP_HALVINGS: usize = 30;

pub const DEFAULT_MAX_ITERATIONS: usize = 200;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Initial angles stay this far from `0` and `pi`.
const INIT_MARGIN: f64 = 0.1;

/// Spreads of the successive initial guesses in the unconstrained variables.
/// The objective is symmetric under permutation of the constituents, so an
/// exactly equal-angle start would never leave the equal-angle family, and a
/// run that lets two constituents merge stalls on that symmetric subspace.
/// Later starts are tried only while the iteration budget lasts.
const INIT_SPREADS: [f64; 6] = [0.3, 1.0, 2.0, 3.0, 4.0, 6.0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("invalid waypoint {index}: {reason}")]
    InvalidWaypoint { index: usize, reason: String },
    #[error("waypoints {first} and {second} share xi = {xi}")]
    DuplicateXi { first: usize, second: usize, xi: f64 },
    #[error("invalid design problem: {0}")]
    InvalidProblem(String),
    #[error("waypoints are infeasible: {}", .0.summary())]
    Infeasible(FeasibilityReport),
}

pub type Result<T, E = DesignError> = std::result::Result<T, E>;

fn default_weight() -> f64 {
    1.0
}

/// A required `(xi, phi)` pair on the kinematic curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub xi: f64,
    pub phi: f64,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

impl Waypoint {
    pub fn new(xi: f64, phi: f64) -> Self {
        Waypoint { xi, phi, weight: 1.0 }
    }

    pub fn weighted(xi: f64, phi: f64, weight: f64) -> Self {
        Waypoint { xi, phi, weight }
    }
}

fn default_max_iterations() -> usize {
    DEFAULT_MAX_ITERATIONS
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignProblem {
    pub waypoints: Vec<Waypoint>,
    /// Number of reverse folds in the joint.
    pub n: usize,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// A solution is converged when every waypoint residual is within this.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl DesignProblem {
    pub fn new(waypoints: Vec<Waypoint>, n: usize) -> Self {
        DesignProblem {
            waypoints,
            n,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution {
    /// Constituent angles, sorted ascending.
    #[serde(flatten)]
    pub joint: SpringJointSpec,
    /// `phi(xi_j) - phi_j` for each waypoint, in input order.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl DesignSolution {
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.abs()).fold(0.0, f64::max)
    }
}

/// Why a waypoint cannot lie on any spring-joint curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    /// Fold angles never exceed `pi`.
    AbovePi,
    /// Curves are non-increasing, so nothing rises above the start angle.
    AboveStartAngle,
    /// Every curve with this start angle lies on or above the envelope.
    BelowEnvelope,
    /// Larger `xi` than an earlier waypoint but a larger `phi`.
    NonMonotone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointVerdict {
    pub index: usize,
    pub violations: Vec<Violation>,
}

impl WaypointVerdict {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub verdicts: Vec<WaypointVerdict>,
    pub monotone: bool,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.monotone && self.verdicts.iter().all(WaypointVerdict::feasible)
    }

    pub fn summary(&self) -> String {
        let bad: Vec<String> = self
            .verdicts
            .iter()
            .filter(|v| !v.feasible())
            .map(|v| format!("#{} {:?}", v.index, v.violations))
            .collect();
        if bad.is_empty() {
            "feasible".to_string()
        } else {
            bad.join(", ")
        }
    }
}

fn validate_waypoints(waypoints: &[Waypoint]) -> Result<()> {
    let invalid = |index: usize, reason: &str| DesignError::InvalidWaypoint { index, reason: reason.into() };
    for (i, w) in waypoints.iter().enumerate() {
        if !(w.xi.is_finite() && (0.0..PI).contains(&w.xi)) {
            return Err(invalid(i, "xi must lie in [0, pi)"));
        }
        if !w.phi.is_finite() {
            return Err(invalid(i, "phi must be finite"));
        }
        if !(w.weight.is_finite() && w.weight >= 0.0) {
            return Err(invalid(i, "weight must be a non-negative number"));
        }
    }
    for i in 0..waypoints.len() {
        for j in i + 1..waypoints.len() {
            if (waypoints[i].xi - waypoints[j].xi).abs() <= DUPLICATE_XI_TOLERANCE {
                return Err(DesignError::DuplicateXi { first: i, second: j, xi: waypoints[i].xi });
            }
        }
    }
    Ok(())
}

fn screen(waypoints: &[Waypoint], phi0_max: Option<f64>) -> FeasibilityReport {
    let mut verdicts: Vec<WaypointVerdict> = (0..waypoints.len())
        .map(|index| WaypointVerdict { index, violations: Vec::new() })
        .collect();
    for (w, verdict) in waypoints.iter().zip(&mut verdicts) {
        if w.phi > PI + FEASIBILITY_TOLERANCE {
            verdict.violations.push(Violation::AbovePi);
        }
        if let Some(max) = phi0_max {
            if w.phi > max + FEASIBILITY_TOLERANCE {
                verdict.violations.push(Violation::AboveStartAngle);
            }
            if let Ok(floor) = envelope_fold_angle(w.xi, max) {
                if w.phi < floor - FEASIBILITY_TOLERANCE {
                    verdict.violations.push(Violation::BelowEnvelope);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..waypoints.len()).collect();
    order.sort_by(|&a, &b| waypoints[a].xi.total_cmp(&waypoints[b].xi));
    let mut monotone = true;
    for pair in order.windows(2) {
        let (lo, hi) = (&waypoints[pair[0]], &waypoints[pair[1]]);
        if hi.phi > lo.phi + FEASIBILITY_TOLERANCE {
            monotone = false;
            verdicts[pair[1]].violations.push(Violation::NonMonotone);
        }
    }
    FeasibilityReport { verdicts, monotone }
}

/// Screens waypoints against the region reachable by spring joints whose
/// start angle is `phi0_max`: below `pi`, below the start angle, on or above
/// the envelope, and non-increasing in `xi`.
pub fn check_feasibility(waypoints: &[Waypoint], phi0_max: f64) -> FeasibilityReport {
    screen(waypoints, Some(phi0_max))
}

fn start_waypoint(waypoints: &[Waypoint]) -> Option<&Waypoint> {
    waypoints.iter().find(|w| w.xi.abs() <= DUPLICATE_XI_TOLERANCE)
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn angles_from(u: &DVector<f64>) -> Vec<f64> {
    u.iter().map(|&v| PI * logistic(v)).collect()
}

fn compound_of(xi: f64, angles: &[f64]) -> f64 {
    let mut acc = reverse_fold_angle(xi, angles[0]).expect("angles stay in (0, pi)");
    for &phi0 in &angles[1..] {
        acc = acc - PI + reverse_fold_angle(xi, phi0).expect("angles stay in (0, pi)");
    }
    acc
}

struct Objective<'a> {
    waypoints: &'a [Waypoint],
    sqrt_weights: Vec<f64>,
}

impl Objective<'_> {
    fn residuals(&self, angles: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.waypoints.len(),
            self.waypoints
                .iter()
                .zip(&self.sqrt_weights)
                .map(|(w, s)| s * (compound_of(w.xi, angles) - w.phi)),
        )
    }

    fn jacobian(&self, u: &DVector<f64>, angles: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.waypoints.len(), angles.len(), |j, k| {
            let sigma = logistic(u[k]);
            let dphi0_du = PI * sigma * (1.0 - sigma);
            self.sqrt_weights[j] * fold_angle_start_derivative(self.waypoints[j].xi, angles[k]) * dphi0_du
        })
    }
}

fn initial_guess(waypoints: &[Waypoint], n: usize, spread: f64) -> DVector<f64> {
    let base = match start_waypoint(waypoints) {
        Some(w) => (w.phi + (n as f64 - 1.0) * PI) / n as f64,
        None => 0.75 * PI,
    }
    .clamp(INIT_MARGIN, PI - INIT_MARGIN);
    let center = logit(base / PI);
    let mid = (n as f64 - 1.0) / 2.0;
    DVector::from_iterator(n, (0..n).map(|k| center + spread * (k as f64 - mid) / n as f64))
}

/// Damped Gauss-Newton from `u`; returns the final angles, residual norm and
/// the number of iterations used.
fn gauss_newton(objective: &Objective, mut u: DVector<f64>, budget: usize) -> (Vec<f64>, f64, usize) {
    let mut angles = angles_from(&u);
    let mut r = objective.residuals(&angles);
    let mut norm = r.norm();
    let mut iterations = 0;

    while iterations < budget && norm > 0.0 {
        iterations += 1;
        let jac = objective.jacobian(&u, &angles);
        let svd = jac.svd(true, true);
        let eps = 1e-12 * svd.singular_values.max();
        let Ok(step) = svd.solve(&r, eps) else { break };

        let mut accepted = None;
        let mut scale = 1.0;
        for _ in 0..=MAX_STEP_HALVINGS {
            let trial_u = &u - &step * scale;
            let trial_angles = angles_from(&trial_u);
            if trial_angles.iter().all(|a| *a > 0.0 && *a < PI) {
                let trial_r = objective.residuals(&trial_angles);
                let trial_norm = trial_r.norm();
                if trial_norm < norm {
                    accepted = Some((trial_u, trial_angles, trial_r, trial_norm));
                    break;
                }
            }
            scale *= 0.5;
        }
        let Some((new_u, new_angles, new_r, new_norm)) = accepted else { break };
        let change = norm - new_norm;
        u = new_u;
        angles = new_angles;
        r = new_r;
        norm = new_norm;
        if change < STALL_TOLERANCE {
            break;
        }
    }

    (angles, norm, iterations)
}

/// Fits the constituent angles of an `n`-fold joint to the waypoints by damped
/// Gauss-Newton in unconstrained variables `u_k`, `phi0_k = pi * sigma(u_k)`.
///
/// Screening uses the start angle from a `xi = 0` waypoint when one is given.
/// Non-convergence is reported through [`DesignSolution::converged`].
pub fn solve_waypoints(problem: &DesignProblem) -> Result<DesignSolution> {
    let waypoints = &problem.waypoints;
    if problem.n == 0 {
        return Err(DesignError::InvalidProblem("n must be at least 1".into()));
    }
    if waypoints.is_empty() {
        return Err(DesignError::InvalidProblem("at least one waypoint is required".into()));
    }
    if problem.max_iterations == 0 {
        return Err(DesignError::InvalidProblem("max_iterations must be positive".into()));
    }
    if !(problem.tolerance.is_finite() && problem.tolerance > 0.0) {
        return Err(DesignError::InvalidProblem("tolerance must be positive".into()));
    }
    validate_waypoints(waypoints)?;
    let max_weight = waypoints.iter().map(|w| w.weight).fold(0.0, f64::max);
    if max_weight <= 0.0 {
        return Err(DesignError::InvalidProblem("at least one weight must be positive".into()));
    }
    let report = screen(waypoints, start_waypoint(waypoints).map(|w| w.phi));
    if !report.feasible() {
        return Err(DesignError::Infeasible(report));
    }

    let objective = Objective {
        waypoints,
        sqrt_weights: waypoints.iter().map(|w| (w.weight / max_weight).sqrt()).collect(),
    };
    let mut iterations = 0;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for &spread in &INIT_SPREADS {
        let budget = problem.max_iterations - iterations;
        if budget == 0 {
            break;
        }
        let (angles, norm, used) = gauss_newton(&objective, initial_guess(waypoints, problem.n, spread), budget);
        iterations += used;
        let improved = best.as_ref().is_none_or(|(_, b)| norm < *b);
        if improved {
            best = Some((angles, norm));
        }
        let done = objective
            .residuals(&best.as_ref().expect("set above").0)
            .iter()
            .zip(&objective.sqrt_weights)
            .all(|(r, w)| *w == 0.0 || (r / w).abs() <= problem.tolerance);
        if done {
            break;
        }
    }
    let (mut angles, _) = best.expect("at least one start runs");

    angles.sort_by(f64::total_cmp);
    let joint = SpringJointSpec::new(angles).expect("logistic keeps angles in (0, pi)");
    let residuals: Vec<f64> = waypoints
        .iter()
        .map(|w| compound_fold_angle(w.xi, &joint).expect("waypoint xi validated") - w.phi)
        .collect();
    let converged = waypoints
        .iter()
        .zip(&residuals)
        .all(|(w, r)| w.weight == 0.0 || r.abs() <= problem.tolerance);
    Ok(DesignSolution { joint, residuals, converged, iterations })
}

/// Designs an `n`-fold joint that starts at `phi0_start` and reaches
/// `phi_unfolded` at dihedral angle `xi_unfolded`.
pub fn solve_two_point(phi0_start: f64, phi_unfolded: f64, xi_unfolded: f64, n: usize) -> Result<DesignSolution> {
    if n < 2 {
        return Err(DesignError::InvalidProblem("a two-point design needs n >= 2".into()));
    }
    solve_waypoints(&DesignProblem::new(
        vec![Waypoint::new(0.0, phi0_start), Waypoint::new(xi_unfolded, phi_unfolded)],
        n,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_waypoint_alone_is_feasible() {
        assert!(check_feasibility(&[Waypoint::new(0.0, 1.2)], 1.2).feasible());
    }

    #[test]
    fn above_envelope_is_infeasible() {
        let report = check_feasibility(&[Waypoint::new(PI / 2.0, PI)], PI / 2.0);
        assert!(!report.feasible());
        assert!(report.verdicts[0].violations.contains(&Violation::AboveStartAngle));
    }

    #[test]
    fn increasing_waypoints_are_infeasible() {
        let report = check_feasibility(&[Waypoint::new(1.0, -1.0), Waypoint::new(2.0, -0.5)], 0.0);
        assert!(!report.monotone);
        assert!(!report.feasible());
    }

    #[test]
    fn below_envelope_is_infeasible() {
        let floor = envelope_fold_angle(2.0, 0.0).unwrap();
        let report = check_feasibility(&[Waypoint::new(2.0, floor - 0.1)], 0.0);
        assert_eq!(report.verdicts[0].violations, vec![Violation::BelowEnvelope]);
    }

    #[test]
    fn single_fold_from_start_angle() {
        let s = solve_waypoints(&DesignProblem::new(vec![Waypoint::new(0.0, 1.1)], 1)).unwrap();
        assert!(s.converged);
        assert!((s.joint.constituents()[0] - 1.1).abs() <= 1e-9);
    }

    #[test]
    fn duplicate_xi_rejected() {
        assert!(matches!(
            solve_two_point(1.0, 1.0, 0.0, 3),
            Err(DesignError::DuplicateXi { .. })
        ));
    }

    #[test]
    fn problem_validation() {
        assert!(solve_waypoints(&DesignProblem::new(vec![], 2)).is_err());
        assert!(solve_waypoints(&DesignProblem::new(vec![Waypoint::new(1.0, 0.0)], 0)).is_err());
        assert!(solve_waypoints(&DesignProblem::new(vec![Waypoint::new(PI, 0.0)], 2)).is_err());
        assert!(solve_waypoints(&DesignProblem::new(vec![Waypoint::weighted(1.0, 0.0, 0.0)], 2)).is_err());
        assert!(solve_two_point(1.0, 0.5, 1.0, 1).is_err());
    }

    #[test]
    fn solution_json_shape() {
        let s = solve_waypoints(&DesignProblem::new(vec![Waypoint::new(0.0, 1.1)], 1)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        for key in ["constituent_angles", "residuals", "converged", "iterations"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: DesignSolution = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn problem_json_defaults() {
        let p: DesignProblem =
            serde_json::from_str(r#"{"waypoints":[{"xi":0.0,"phi":1.0}],"n":2}"#).unwrap();
        assert_eq!(p.waypoints[0].weight, 1.0);
        assert_eq!(p.max_iterations, DEFAULT_MAX_ITERATIONS);
        assert_eq!(p.tolerance, DEFAULT_TOLERANCE);
    }
}
