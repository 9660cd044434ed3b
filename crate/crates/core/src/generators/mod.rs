//! Crease-pattern synthesis for spring joints.
//!
//! Straight and Miura patterns are drawn with the pleats running along `+x`
//! and fold groups crossing them; each reverse fold is a zigzag whose segments
//! make the angle `phi0 / 2` with the pleats, and each pi-fold is a straight
//! line perpendicular to them.

use std::f64::consts::PI;

use thiserror::Error;

use crate::kinematics::{KinematicsError, PI_FOLD_TOLERANCE};
use crate::pattern::{Assignment, PatternBuilder, PatternError};

mod miura;
mod modular;
mod straight;
mod tilted;

pub use miura::{gen_miura_with_spring_joints, gen_plain_miura, MiuraSubstitutionSpec};
pub use modular::{
    gen_modular_units, gen_tilted_modular_units, ModularJointSpec, ModularLayout, ModularParams, ModularUnit,
    MODULAR_UNIT_COUNT,
};
pub use straight::{gen_straight_spring_joint, pattern_start_angle, StraightJointParams};
pub use tilted::{gen_tilted_spring_joint, TiltedJoint, TiltedJointParams};

/// Slack required between neighbouring fold lines.
const SEPARATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("construction failed at {step}: {reason}")]
    Construction { step: String, reason: String },
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

pub type Result<T, E = GeneratorError> = std::result::Result<T, E>;

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GeneratorError::InvalidParams(format!("{name} must be positive, got {value}")))
    }
}

/// One line of a fold group: the zigzag half-angle and its amplitude (the
/// horizontal shift between consecutive pleats).
#[derive(Debug, Clone, Copy)]
struct GroupLine {
    amplitude: f64,
    /// Whether the line takes the group's own sign (reverse folds) or the
    /// opposite one (pi-folds).
    primary: bool,
}

/// Lines of a spring-joint group: the reverse folds interleaved with
/// pi-folds.
fn group_lines(constituents: &[f64], pleat_width: f64) -> Vec<GroupLine> {
    let mut lines = Vec::with_capacity(2 * constituents.len() - 1);
    for (k, &phi0) in constituents.iter().enumerate() {
        if k > 0 {
            lines.push(GroupLine { amplitude: 0.0, primary: false });
        }
        lines.push(GroupLine { amplitude: zigzag_amplitude(phi0, pleat_width), primary: true });
    }
    lines
}

/// Horizontal shift of a reverse-fold zigzag across one pleat of width
/// `pleat_width`: `pleat_width * cot(phi0 / 2)`.
fn zigzag_amplitude(phi0: f64, pleat_width: f64) -> f64 {
    if (phi0 - PI).abs() <= PI_FOLD_TOLERANCE {
        0.0
    } else {
        pleat_width / (0.5 * phi0).tan()
    }
}

/// Rejects neighbouring zigzags that would cross: with parallel phase, the
/// left line's amplitude may exceed the right one's by less than their
/// spacing.
fn check_separation(left: (f64, f64), right: (f64, f64), what: &str) -> Result<()> {
    let (x_l, a_l) = left;
    let (x_r, a_r) = right;
    let spacing = x_r - x_l;
    if spacing <= SEPARATION_TOLERANCE || a_l - a_r >= spacing - SEPARATION_TOLERANCE {
        return Err(GeneratorError::Geometry(format!(
            "{what}: spacing {spacing} cannot absorb the zigzag amplitude difference {} (pleat width too large for the fold angles)",
            a_l - a_r
        )));
    }
    Ok(())
}

/// Adds a zigzag fold line based at `x0` across pleat rows `0..=rows` of
/// height `h`, continued to the top border at `top` when it lies above the
/// last row.
fn add_zigzag(b: &mut PatternBuilder, x0: f64, amplitude: f64, h: f64, rows: usize, top: f64, assignment: Assignment) {
    let point = |j: usize| [x0 + (j % 2) as f64 * amplitude, j as f64 * h];
    let mut points: Vec<[f64; 2]> = (0..=rows).map(point).collect();
    let last_y = rows as f64 * h;
    if top > last_y + SEPARATION_TOLERANCE {
        let frac = (top - last_y) / h;
        let [x_last, _] = point(rows);
        let [x_next, _] = point(rows + 1);
        points.push([x_last + (x_next - x_last) * frac, top]);
    }
    b.add_polyline(&points, assignment);
}

/// Alternating pleat sign: valley on odd parity.
fn parity_assignment(parity: usize) -> Assignment {
    if parity % 2 == 1 {
        Assignment::Valley
    } else {
        Assignment::Mountain
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_of_pi_fold_is_zero() {
        assert_eq!(zigzag_amplitude(PI, 1.0), 0.0);
        assert!((zigzag_amplitude(PI / 2.0, 2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn group_has_interleaved_pi_folds() {
        let lines = group_lines(&[2.0, 2.5, 2.8], 1.0);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines.iter().filter(|l| l.primary).count(), 3);
        assert!(lines.iter().filter(|l| !l.primary).all(|l| l.amplitude == 0.0));
    }
}
