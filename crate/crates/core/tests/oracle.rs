use std::f64::consts::PI;

use springjoint::oracle::{
    default_segment_lengths, folded_profile, oracle_grid, oracle_reverse_fold_angle, vertex_loop_closure,
    vertex_loop_closure_on_branch, Branch, Degree4Vertex, OracleError, CLOSURE_TOLERANCE, REVERSE_FOLD_SIGNS,
};
use springjoint::{compound_fold_angle, reverse_fold_angle, SpringJointSpec};

#[test]
fn oracle_agrees_with_closed_form_on_a_coarse_grid() {
    let grid = oracle_grid(12, 12).unwrap();
    assert_eq!(grid.samples.len(), 144);
    assert!(grid.max_abs_err() <= 1e-9, "{}", grid.max_abs_err());
    let csv = grid.to_csv();
    assert_eq!(csv.lines().count(), 145);
}

#[test]
fn oracle_matches_frozen_values() {
    assert!((oracle_reverse_fold_angle(PI / 2.0, 0.75 * PI).unwrap() - 2.081787074091966).abs() < 1e-10);
    assert!((oracle_reverse_fold_angle(1.0, 2.0).unwrap() - 1.8782721920088523).abs() < 1e-10);
}

#[test]
fn closure_residual_is_small() {
    let v = Degree4Vertex::reverse_fold(2.0).unwrap();
    let c = vertex_loop_closure_on_branch(&v, PI - 1.3, 2, Branch::Signs(REVERSE_FOLD_SIGNS)).unwrap();
    assert!(c.residual <= CLOSURE_TOLERANCE);
    assert!((c.fold_angles[2] - (PI - 1.3)).abs() < 1e-15);
}

#[test]
fn generic_vertex_closes() {
    let v = Degree4Vertex::new([1.2, 1.6, 1.9, 2.0 * PI - 4.7]).unwrap();
    let c = vertex_loop_closure(&v, 0.6, 0).unwrap();
    assert!(c.residual <= CLOSURE_TOLERANCE);
}

#[test]
fn invalid_vertices_are_rejected() {
    assert!(matches!(Degree4Vertex::new([1.0, 1.0, 1.0, 1.0]), Err(OracleError::SectorSum(_))));
    assert!(matches!(Degree4Vertex::new([PI, 0.5, 0.5, PI - 1.0]), Err(OracleError::SectorOutOfRange(_))));
    let v = Degree4Vertex::reverse_fold(2.0).unwrap();
    assert!(matches!(vertex_loop_closure(&v, 0.5, 4), Err(OracleError::CreaseIndex(4))));
    assert!(matches!(oracle_grid(0, 3), Err(OracleError::EmptyGrid)));
}

#[test]
fn profile_turn_equals_compound_angle() {
    let joint = SpringJointSpec::new(vec![2.0, 2.6, 2.9]).unwrap();
    for xi in [0.0, 0.7, 1.5, 2.4] {
        let profile = folded_profile(&joint, xi, &default_segment_lengths(joint.len())).unwrap();
        let turn = profile.total_turn();
        assert!((turn - compound_fold_angle(xi, &joint).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn profile_rejects_wrong_lengths() {
    let joint = SpringJointSpec::equal(2, 2.0).unwrap();
    assert!(matches!(folded_profile(&joint, 0.5, &[1.0]), Err(OracleError::SegmentCount { .. })));
}

#[test]
fn single_fold_profile_matches_reverse_fold() {
    let joint = SpringJointSpec::new(vec![1.1]).unwrap();
    let profile = folded_profile(&joint, 1.0, &default_segment_lengths(1)).unwrap();
    assert!((profile.total_turn() - reverse_fold_angle(1.0, 1.1).unwrap()).abs() < 1e-12);
    assert!(!profile.has_collision());
}
