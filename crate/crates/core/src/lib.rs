//! Spring-joint origami mechanisms: closed-form kinematics of reverse folds
//! and their compound chains, inverse design from motion waypoints, crease
//! pattern synthesis and flat-foldability validation.
//!
//! All angles are `f64` radians. Fold angles are signed (valley positive,
//! mountain negative); dihedral angles run from `0` (fully folded) to `pi`
//! (flat).

pub mod design;
pub mod generators;
pub mod kinematics;
pub mod oracle;
pub mod pattern;

pub use design::{
    check_feasibility, solve_two_point, solve_waypoints, DesignError, DesignProblem,
    DesignSolution, FeasibilityReport, Waypoint,
};
pub use kinematics::{
    compound_fold_angle, compound_start_angle, envelope_fold_angle, find_hard_stop,
    invert_dihedral, reverse_fold_angle, sample_curve, KinematicCurve, KinematicsError,
    SpringJointSpec,
};
pub use pattern::{Assignment, Crease, CreasePattern, PatternError, VertexReport};
