use std::f64::consts::PI;

use springjoint::generators::{
    gen_miura_with_spring_joints, gen_modular_units, gen_plain_miura, gen_straight_spring_joint,
    gen_tilted_modular_units, gen_tilted_spring_joint, pattern_start_angle, GeneratorError, MiuraSubstitutionSpec,
    StraightJointParams, TiltedJointParams, MODULAR_UNIT_COUNT,
};
use springjoint::pattern::{flat_fold_map, from_fold_json, to_fold_json, to_svg, validate_flat_foldable, SvgStyle};
use springjoint::{compound_fold_angle, compound_start_angle, Assignment, CreasePattern, SpringJointSpec};

const TOL: f64 = 1e-9;

fn joint(angles: &[f64]) -> SpringJointSpec {
    SpringJointSpec::new(angles.to_vec()).unwrap()
}

fn assert_valid(cp: &CreasePattern, label: &str) {
    let report = validate_flat_foldable(cp, TOL);
    let failures: Vec<_> = report.failures().collect();
    assert!(failures.is_empty(), "{label}: {failures:?}");
    for seed in [0, cp.faces().len() - 1] {
        flat_fold_map(cp, seed, TOL).unwrap_or_else(|e| panic!("{label}: {e}"));
    }
}

#[test]
fn straight_joints_are_flat_foldable() {
    let cases: [(&[f64], f64); 5] =
        [(&[PI / 2.0], 0.5), (&[0.75 * PI; 4], 0.5), (&[2.0, 2.5, 2.8], 0.5), (&[PI - 0.1; 6], 0.5), (&[1.2, PI, 2.2], 1.5)];
    for (angles, spacing) in cases {
        let params = StraightJointParams { group_spacing: Some(spacing), ..StraightJointParams::new(joint(angles), 3.0, 0.5) };
        let cp = gen_straight_spring_joint(&params).unwrap();
        assert_valid(&cp, &format!("straight {angles:?}"));
    }
}

#[test]
fn straight_joint_reproduces_compound_start_angle() {
    let cases: [&[f64]; 4] = [&[PI / 2.0], &[2.0, 2.5], &[0.75 * PI; 4], &[2.6, 2.9, 3.0]];
    for angles in cases {
        let j = joint(angles);
        let cp = gen_straight_spring_joint(&StraightJointParams::new(j.clone(), 3.0, 0.5)).unwrap();
        let turn = pattern_start_angle(&cp, TOL).unwrap();
        let expected = compound_start_angle(&j);
        let wrapped = (expected + PI).rem_euclid(2.0 * PI) - PI;
        let diff = (turn.abs() - wrapped.abs()).abs();
        assert!(diff < 1e-9, "{angles:?}: pattern turn {turn}, joint start {expected}");
    }
}

#[test]
fn straight_joint_rejects_crowded_groups() {
    let params = StraightJointParams { group_spacing: Some(0.1), ..StraightJointParams::new(joint(&[0.4, PI, 2.8]), 3.0, 0.5) };
    assert!(matches!(gen_straight_spring_joint(&params), Err(GeneratorError::Geometry(_))));
}

#[test]
fn pi_folds_are_straight_lines() {
    let cp = gen_straight_spring_joint(&StraightJointParams::new(joint(&[2.0, 2.0]), 3.0, 0.5)).unwrap();
    let vs = cp.vertices();
    let vertical_mountains = cp
        .creases()
        .iter()
        .filter(|c| c.assignment == Assignment::Mountain)
        .filter(|c| (vs[c.vertices[0]][0] - vs[c.vertices[1]][0]).abs() < 1e-12)
        .count();
    assert!(vertical_mountains >= 1);
}

#[test]
fn plain_miura_is_flat_foldable() {
    for (rows, cols, angle) in [(1, 1, PI / 3.0), (2, 3, 5.0 * PI / 12.0), (3, 2, 1.2)] {
        let cp = gen_plain_miura(rows, cols, 2.0, 1.0, angle).unwrap();
        assert_valid(&cp, &format!("miura {rows}x{cols}"));
    }
}

#[test]
fn miura_substitution_is_flat_foldable() {
    for (rows, cols) in [(1, 1), (2, 2), (2, 3)] {
        let spec = MiuraSubstitutionSpec::for_joint(rows, cols, 4.0, 1.0, joint(&[23.0 * PI / 24.0; 4]));
        let cp = gen_miura_with_spring_joints(&spec).unwrap();
        assert_valid(&cp, &format!("substituted miura {rows}x{cols}"));
    }
}

#[test]
fn miura_substitution_with_identical_constituents_fixes_the_same_folded_turn() {
    let j = joint(&[23.0 * PI / 24.0; 4]);
    let spec = MiuraSubstitutionSpec::for_joint(1, 1, 4.0, 1.0, j.clone());
    let cp = gen_miura_with_spring_joints(&spec).unwrap();
    let turn = pattern_start_angle(&cp, TOL).unwrap();
    let reference = gen_plain_miura(1, 1, 4.0, 1.0, spec.miura_angle).unwrap();
    let reference_turn = pattern_start_angle(&reference, TOL).unwrap();
    assert!((turn - reference_turn).abs() < 1e-9, "{turn} vs {reference_turn}");
    assert!((2.0 * spec.miura_angle - 5.0 * PI / 6.0).abs() < 1e-12);
}

#[test]
fn miura_substitution_rejects_mismatched_angle() {
    let mut spec = MiuraSubstitutionSpec::for_joint(1, 1, 4.0, 1.0, joint(&[23.0 * PI / 24.0; 4]));
    spec.miura_angle += 0.01;
    assert!(matches!(gen_miura_with_spring_joints(&spec), Err(GeneratorError::InvalidParams(_))));
}

#[test]
fn tilted_joints_are_parallel_and_flat_foldable() {
    for (d, l, n) in [(0.1, 1.0, 2), (0.2, 1.0, 2), (0.3, 1.5, 2), (0.1, 1.0, 3), (0.05, 1.0, 4)] {
        let t = gen_tilted_spring_joint(&TiltedJointParams::new(d, l, n, 0.4)).unwrap();
        assert!(t.parallelism_error() <= 1e-9, "d={d} l={l} n={n}: {}", t.parallelism_error());
        assert_valid(&t.pattern, &format!("tilted d={d} l={l} n={n}"));
    }
}

#[test]
fn tilted_axis_grows_with_lean() {
    let small = gen_tilted_spring_joint(&TiltedJointParams::new(0.05, 1.0, 2, 0.4)).unwrap();
    let large = gen_tilted_spring_joint(&TiltedJointParams::new(0.2, 1.0, 2, 0.4)).unwrap();
    assert!(large.axis_angle.abs() > small.axis_angle.abs());
}

#[test]
fn modular_layout_predicts_compound_curve() {
    let j = joint(&[2.2, 2.6, 2.9]);
    let layout = gen_modular_units(&j, 4.0, 1.0).unwrap();
    assert_eq!(layout.units.len(), MODULAR_UNIT_COUNT);
    for i in 0..=50 {
        let xi = PI * i as f64 / 50.0;
        let predicted = layout.spec.predicted_fold_angle(xi).unwrap();
        assert!((predicted - compound_fold_angle(xi, &j).unwrap()).abs() <= 1e-12);
    }
    assert_valid(&layout.pattern, "modular");
    let mirrored: Vec<bool> = layout.units.iter().map(|u| u.mirrored).collect();
    assert_eq!(mirrored, vec![false, true, false, true]);
}

#[test]
fn tilted_modular_layout_is_valid() {
    let layout = gen_tilted_modular_units(&joint(&[2.5, 2.8]), 4.0, 1.0).unwrap();
    assert_valid(&layout.pattern, "tilted modular");
}

#[test]
fn exports_are_deterministic() {
    let cp = gen_straight_spring_joint(&StraightJointParams::new(joint(&[0.75 * PI; 4]), 3.0, 0.5)).unwrap();
    let fold = to_fold_json(&cp);
    assert_eq!(fold, to_fold_json(&from_fold_json(&fold).unwrap()));
    assert_eq!(to_svg(&cp, &SvgStyle::default()), to_svg(&cp, &SvgStyle::default()));
}
