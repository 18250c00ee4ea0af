mod common;

use common::oracle;
use proptest::prelude::*;
use qmlkit::autodiff::{finite_diff_grad, param_shift_grad};
use qmlkit::rng::rng_from_seed;
use qmlkit::{
    build_layered, Angle, Circuit, Encoding, Entangler, Error, GateKind, Observable, Op, Pauli,
};
use rand::Rng;

/// Central difference of a dense-oracle expectation.
fn oracle_fd(
    c: &Circuit,
    x: &[f64],
    theta: &[f64],
    factors: &[(usize, Pauli)],
    slot: usize,
    h: f64,
) -> f64 {
    let m = oracle::pauli_string_matrix(factors, c.n_qubits());
    let f = |t: &[f64]| oracle::dense_expectation(&oracle::dense_state(c, x, t), &m).re;
    let mut p = theta.to_vec();
    p[slot] += h;
    let plus = f(&p);
    p[slot] -= 2.0 * h;
    (plus - f(&p)) / (2.0 * h)
}

#[test]
fn shift_rule_matches_finite_difference() {
    let mut rng = rng_from_seed(21);
    for trial in 0..40 {
        let n = 1 + trial % 8;
        let c = oracle::random_circuit(n, 25, 1, 4, &mut rng);
        let theta: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let obs = Observable::new(oracle::random_pauli_string(n, &mut rng)).unwrap();
        let slot = rng.gen_range(0..4);
        let ps = param_shift_grad(&c, &[0.4], &theta, &obs, slot).unwrap();
        let fd = finite_diff_grad(&c, &[0.4], &theta, &obs, slot, 1e-5).unwrap();
        assert!((ps - fd).abs() < 1e-6, "trial {trial}: {ps} vs {fd}");
    }
}

#[test]
fn jacobian_matches_dense_oracle_difference() {
    let mut rng = rng_from_seed(22);
    for _ in 0..10 {
        let c = oracle::random_circuit(4, 20, 2, 3, &mut rng);
        let mut c = c;
        let factors = oracle::random_pauli_string(4, &mut rng);
        c.set_observables(vec![Observable::new(factors.clone()).unwrap()])
            .unwrap();
        let x = [0.7, -0.2];
        let theta = [0.1, 1.9, -2.4];
        let j = c.jacobian(&x, &theta).unwrap();
        for k in 0..3 {
            let want = oracle_fd(&c, &x, &theta, &factors, k, 1e-5);
            assert!((j.d_params[k][0] - want).abs() < 1e-6);
        }
        // inputs: move x through the same oracle by treating them as params
        for i in 0..2 {
            let mut xp = x;
            xp[i] += 1e-5;
            let m = oracle::pauli_string_matrix(&factors, 4);
            let plus = oracle::dense_expectation(&oracle::dense_state(&c, &xp, &theta), &m).re;
            xp[i] -= 2e-5;
            let minus = oracle::dense_expectation(&oracle::dense_state(&c, &xp, &theta), &m).re;
            assert!((j.d_inputs[i][0] - (plus - minus) / 2e-5).abs() < 1e-6);
        }
    }
}

#[test]
fn shift_rule_on_cosine() {
    let mut c = Circuit::new(1, 0, 1).unwrap();
    c.push(Op::rot(GateKind::Ry, 0, Angle::Param(0))).unwrap();
    let z = Observable::z(0);
    for theta in [0.0, 0.3, std::f64::consts::FRAC_PI_2, 2.0] {
        let g = param_shift_grad(&c, &[], &[theta], &z, 0).unwrap();
        assert!((g + theta.sin()).abs() < 1e-12);
    }
    assert!(matches!(
        param_shift_grad(&c, &[], &[0.0], &z, 3),
        Err(Error::UnsupportedGenerator(_))
    ));
}

#[test]
fn layered_circuit_evaluates_like_oracle() {
    let c = build_layered(4, 4, 2, Encoding::HadamardAngle, Entangler::Ring).unwrap();
    assert_eq!(c.n_params(), 16);
    let x = [0.1, 0.2, 0.3, 0.4];
    let theta: Vec<f64> = (0..16).map(|k| 0.1 * k as f64 - 0.7).collect();
    let out = c.run(&x, &theta).unwrap();
    let psi = oracle::dense_state(&c, &x, &theta);
    for q in 0..4 {
        let want =
            oracle::dense_expectation(&psi, &oracle::pauli_string_matrix(&[(q, Pauli::Z)], 4)).re;
        assert!((out[q] - want).abs() < 1e-10);
    }
    assert!(c.run(&x[..3], &theta).is_err());
    assert!(c.run(&x, &theta[..15]).is_err());
}

#[test]
fn document_errors_name_their_location() {
    let bad_gate = r#"{"version": 1, "n_qubits": 1, "ops": [{"gate": "RQ", "targets": [0]}]}"#;
    match Circuit::from_json(bad_gate) {
        Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 1"), "{location}"),
        other => panic!("expected parse error, got {other:?}"),
    }
    let bad_target = r#"{"version": 1, "n_qubits": 2, "ops": [
        {"gate": "H", "targets": [0]},
        {"gate": "CNOT", "targets": [0, 2]}]}"#;
    match Circuit::from_json(bad_target) {
        Err(Error::Parse { location, .. }) => assert_eq!(location, "ops[1]"),
        other => panic!("expected parse error, got {other:?}"),
    }
    let bad_version = r#"{"version": 9, "n_qubits": 1, "ops": []}"#;
    assert!(
        matches!(Circuit::from_json(bad_version), Err(Error::Parse { location, .. }) if location == "version")
    );
}

fn circuit_strategy() -> impl Strategy<Value = Circuit> {
    (1usize..=5, 0usize..=30, any::<u64>()).prop_map(|(n, depth, seed)| {
        let mut rng = rng_from_seed(seed);
        let mut c = oracle::random_circuit(n, depth, 2, 3, &mut rng);
        let obs = (0..rng.gen_range(0..3))
            .map(|_| Observable::new(oracle::random_pauli_string(n, &mut rng)).unwrap());
        c.set_observables(obs.collect()).unwrap();
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_identity(c in circuit_strategy()) {
        let back = Circuit::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn shift_gradient_is_periodic_in_parameter(theta in -3.0..3.0f64) {
        let c = build_layered(2, 0, 1, Encoding::Angle, Entangler::Chain).unwrap();
        let obs = Observable::z(1);
        let mut t = vec![0.3, theta, -0.4, 0.9];
        let g0 = param_shift_grad(&c, &[], &t, &obs, 1).unwrap();
        t[1] += 4.0 * std::f64::consts::PI;
        let g1 = param_shift_grad(&c, &[], &t, &obs, 1).unwrap();
        prop_assert!((g0 - g1).abs() < 1e-10);
    }
}
