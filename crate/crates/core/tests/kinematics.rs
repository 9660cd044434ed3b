use std::f64::consts::PI;

use proptest::prelude::*;
use springjoint::kinematics::{regime_analysis, signed_reverse_fold_angle};
use springjoint::{
    compound_fold_angle, compound_start_angle, envelope_fold_angle, find_hard_stop, invert_dihedral,
    reverse_fold_angle, sample_curve, KinematicsError, SpringJointSpec,
};

// Frozen from an independent rigid loop-closure computation.
const ORACLE_PHI_HALF_PI_THREE_QUARTER_PI: f64 = 2.081787074091966;
const ORACLE_PHI_ONE_TWO: f64 = 1.8782721920088523;
// Frozen from the closed forms in comments, evaluated independently.
// 2 acos(tan(3pi/8) / tan(23pi/48))
const ZERO_CROSSING_23_24: f64 = 2.8237850448938295;
const HARD_STOP_23_24: f64 = 3.0104116890034085;
// 2 acos(1 / tan(3pi/8))
const HARD_STOP_3_4: f64 = 2.2874354808048407;

fn equal(n: usize, phi0: f64) -> SpringJointSpec {
    SpringJointSpec::equal(n, phi0).unwrap()
}

#[test]
fn single_fold_matches_loop_closure_values() {
    assert!((reverse_fold_angle(PI / 2.0, 0.75 * PI).unwrap() - ORACLE_PHI_HALF_PI_THREE_QUARTER_PI).abs() < 1e-12);
    assert!((reverse_fold_angle(1.0, 2.0).unwrap() - ORACLE_PHI_ONE_TWO).abs() < 1e-12);
}

#[test]
fn reverse_fold_endpoints() {
    assert_eq!(reverse_fold_angle(0.0, 1.3).unwrap(), 1.3);
    assert!(reverse_fold_angle(PI, 1.3).unwrap().abs() < 1e-15);
    assert_eq!(reverse_fold_angle(1.7, PI).unwrap(), PI);
}

#[test]
fn domain_errors() {
    assert!(matches!(reverse_fold_angle(-0.1, 1.0), Err(KinematicsError::DihedralOutOfRange(_))));
    assert!(matches!(reverse_fold_angle(1.0, -0.1), Err(KinematicsError::StartAngleOutOfRange(_))));
    assert!(matches!(reverse_fold_angle(1.0, f64::NAN), Err(KinematicsError::StartAngleOutOfRange(_))));
    assert!(SpringJointSpec::new(vec![]).is_err());
    assert!(SpringJointSpec::new(vec![1.0, 4.0]).is_err());
    assert!(matches!(invert_dihedral(0.0, &equal(3, PI)), Err(KinematicsError::Degenerate)));
    assert!(matches!(envelope_fold_angle(PI, 2.0), Err(KinematicsError::EnvelopeUnbounded(_))));
}

#[test]
fn three_quarter_joint_starts_flat_and_stops() {
    let joint = equal(4, 0.75 * PI);
    assert!(compound_start_angle(&joint).abs() < 1e-15);
    let stop = find_hard_stop(&joint).unwrap();
    assert!((stop - HARD_STOP_3_4).abs() < 1e-10);
    assert!((compound_fold_angle(stop, &joint).unwrap() + PI).abs() < 1e-10);
    let curve = sample_curve(&joint, 200).unwrap();
    assert!(curve.samples.windows(2).all(|w| w[1].1 < w[0].1));
}

#[test]
fn near_flat_joint_crossings() {
    let joint = equal(4, 23.0 * PI / 24.0);
    assert!((compound_start_angle(&joint) - 5.0 * PI / 6.0).abs() < 1e-14);
    let zero = invert_dihedral(0.0, &joint).unwrap();
    assert!((zero - ZERO_CROSSING_23_24).abs() < 1e-10);
    let stop = find_hard_stop(&joint).unwrap();
    assert!((stop - HARD_STOP_23_24).abs() < 1e-10);
    let report = regime_analysis(&joint, 400).unwrap();
    assert_eq!(report.sign_changes, 1);
    assert_eq!(report.hard_stop, Some(stop));
}

#[test]
fn pi_fold_joint_is_constant() {
    let curve = sample_curve(&SpringJointSpec::new(vec![PI]).unwrap(), 50).unwrap();
    assert!(curve.samples.iter().all(|&(_, phi)| phi == PI));
}

#[test]
fn curve_csv_layout() {
    let csv = sample_curve(&equal(2, 2.0), 3).unwrap().to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "xi,phi");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("3.1415926535897931e0,"));
}

#[test]
fn envelope_convergence_slows_with_n() {
    let phi_max = PI / 2.0;
    let err = |n: usize| {
        let joint = SpringJointSpec::envelope_family(n, phi_max).unwrap();
        (0..=250)
            .map(|i| {
                let xi = 2.5 * i as f64 / 250.0;
                (compound_fold_angle(xi, &joint).unwrap() - envelope_fold_angle(xi, phi_max).unwrap()).abs()
            })
            .fold(0.0, f64::max)
    };
    let errors: Vec<f64> = [8, 16, 32, 64].into_iter().map(err).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    // The envelope is approached at a rate of order 1/n; at n = 64 the gap
    // is still above a milliradian.
    assert!(errors[3] > 1e-3 && errors[3] < 3e-3, "{errors:?}");
}

fn phi0() -> impl Strategy<Value = f64> {
    (1e-6..PI - 1e-6).prop_map(|x: f64| x)
}

fn xi() -> impl Strategy<Value = f64> {
    0.0..=PI
}

proptest! {
    #[test]
    fn fold_angle_stays_in_range(xi in xi(), p in phi0()) {
        let phi = reverse_fold_angle(xi, p).unwrap();
        prop_assert!(phi >= 0.0 && phi <= p);
    }

    #[test]
    fn fold_angle_is_monotone_in_xi(a in xi(), b in xi(), p in phi0()) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(reverse_fold_angle(lo, p).unwrap() >= reverse_fold_angle(hi, p).unwrap());
    }

    #[test]
    fn mirrored_fold_is_negated(xi in xi(), p in phi0()) {
        prop_assert_eq!(signed_reverse_fold_angle(xi, -p).unwrap(), -reverse_fold_angle(xi, p).unwrap());
    }

    #[test]
    fn two_fold_joint_is_dual(xi in xi(), a in phi0(), b in phi0()) {
        let joint = SpringJointSpec::new(vec![a, b]).unwrap();
        let expected = reverse_fold_angle(xi, a).unwrap() - PI + reverse_fold_angle(xi, b).unwrap();
        prop_assert_eq!(compound_fold_angle(xi, &joint).unwrap(), expected);
    }

    #[test]
    fn pi_folds_do_not_change_the_curve(xi in xi(), a in phi0(), b in phi0()) {
        let base = SpringJointSpec::new(vec![a, b]).unwrap();
        let padded = SpringJointSpec::new(vec![a, PI, b]).unwrap();
        let diff = compound_fold_angle(xi, &base).unwrap() - compound_fold_angle(xi, &padded).unwrap();
        prop_assert!(diff.abs() < 1e-12);
    }

    #[test]
    fn envelope_bounds_every_joint(xi in 0.0..3.0_f64, angles in prop::collection::vec(1.0..PI - 1e-3, 1..8)) {
        let joint = SpringJointSpec::new(angles).unwrap();
        let start = compound_start_angle(&joint);
        prop_assume!(start > 0.0);
        let floor = envelope_fold_angle(xi, start).unwrap();
        prop_assert!(compound_fold_angle(xi, &joint).unwrap() >= floor - 1e-12);
    }

    #[test]
    fn inversion_round_trips(t in 0.01..0.99_f64, angles in prop::collection::vec(0.5..3.0_f64, 1..6)) {
        let joint = SpringJointSpec::new(angles).unwrap();
        let (max, min) = (compound_start_angle(&joint), compound_fold_angle(PI, &joint).unwrap());
        let target = min + t * (max - min);
        let xi = invert_dihedral(target, &joint).unwrap();
        prop_assert!((compound_fold_angle(xi, &joint).unwrap() - target).abs() < 1e-9);
    }

    #[test]
    fn joint_json_round_trips(angles in prop::collection::vec(1e-3..PI, 1..6)) {
        let joint = SpringJointSpec::new(angles).unwrap();
        let text = serde_json::to_string(&joint).unwrap();
        prop_assert_eq!(serde_json::from_str::<SpringJointSpec>(&text).unwrap(), joint);
    }
}
