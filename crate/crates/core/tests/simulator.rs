mod common;

use common::oracle;
use num_complex::Complex64;
use proptest::prelude::*;
use qmlkit::rng::{rng_from_seed, stream};
use qmlkit::{Error, Gate, Observable, Statevector};

const ALL_GATES: [fn(f64) -> Gate; 7] = [
    |_| Gate::H,
    |_| Gate::X,
    |_| Gate::Y,
    |_| Gate::Z,
    Gate::Rx,
    Gate::Ry,
    Gate::Rz,
];

#[test]
fn strided_updates_match_dense_kronecker() {
    let mut rng = rng_from_seed(11);
    for trial in 0..60 {
        let n = 1 + trial % 6;
        let c = oracle::random_circuit(n, 30, 2, 3, &mut rng);
        let x = [0.3, -1.2];
        let theta = [0.5, 2.5, -0.8];
        let fast = c.state(&x, &theta).unwrap();
        let slow = oracle::dense_state(&c, &x, &theta);
        for (a, b) in fast.amplitudes().iter().zip(&slow) {
            assert!((a - b).norm() < 1e-10, "trial {trial}: {a} vs {b}");
        }
    }
}

#[test]
fn expectation_matches_dense_contraction() {
    let mut rng = rng_from_seed(12);
    for _ in 0..30 {
        let amps = oracle::random_state(6, &mut rng);
        let state = Statevector::from_amplitudes(amps.clone()).unwrap();
        let factors = oracle::random_pauli_string(6, &mut rng);
        let want = oracle::dense_expectation(&amps, &oracle::pauli_string_matrix(&factors, 6));
        assert!(want.im.abs() < 1e-10);
        let got = state
            .expectation(&Observable::new(factors).unwrap())
            .unwrap();
        assert!((got - want.re).abs() < 1e-9, "{got} vs {}", want.re);
    }
}

#[test]
fn probabilities_are_squared_moduli() {
    let mut rng = rng_from_seed(13);
    for n in 1..=6 {
        let amps = oracle::random_state(n, &mut rng);
        let p = Statevector::from_amplitudes(amps.clone())
            .unwrap()
            .probabilities();
        for (pi, a) in p.iter().zip(&amps) {
            assert!((pi - a.norm_sqr()).abs() < 1e-12);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn ground_states_and_size_limits() {
    assert_eq!(
        Statevector::new(1).unwrap().amplitudes(),
        &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    );
    assert_eq!(Statevector::new(2).unwrap().amplitudes().len(), 4);
    assert_eq!(
        Statevector::new(0),
        Err(Error::InvalidSize { n: 0, max: 16 })
    );
    assert!(Statevector::new(17).is_err());
    assert!(Statevector::with_max_qubits(17, 18).is_ok());
}

fn bell() -> Statevector {
    let mut s = Statevector::new(2).unwrap();
    s.apply(Gate::H, &[0]).unwrap();
    s.apply(Gate::Cnot, &[0, 1]).unwrap();
    s
}

#[test]
fn bell_shot_counts_within_three_sigma() {
    let counts = bell().sample_shots(100_000, &mut stream(5, &[])).unwrap();
    let sigma = (0.25f64 * 100_000.0).sqrt();
    for key in ["00", "11"] {
        let k = counts[key] as f64;
        assert!((k - 50_000.0).abs() <= 3.0 * sigma, "{key}: {k}");
    }
    assert_eq!(counts.values().sum::<u64>(), 100_000);
    assert!(!counts.contains_key("01") && !counts.contains_key("10"));
}

#[test]
fn sampling_is_seed_deterministic() {
    let a = bell().sample_shots(1000, &mut stream(9, &[1])).unwrap();
    let b = bell().sample_shots(1000, &mut stream(9, &[1])).unwrap();
    assert_eq!(a, b);
    let ground = Statevector::new(3)
        .unwrap()
        .sample_shots(17, &mut rng_from_seed(0))
        .unwrap();
    assert_eq!(ground.get("000"), Some(&17));
    assert!(matches!(
        bell().sample_shots(0, &mut rng_from_seed(0)),
        Err(Error::InvalidCount(_))
    ));
}

fn gate_strategy(n: usize) -> impl Strategy<Value = (Gate, Vec<usize>)> {
    (0..8usize, 0..n, 1..n.max(2), -6.0..6.0f64).prop_map(move |(k, a, off, theta)| {
        if k == 7 && n > 1 {
            (Gate::Cnot, vec![a, (a + off % n.max(1)) % n])
        } else {
            (ALL_GATES[k % 7](theta), vec![a])
        }
    })
}

fn random_start(n: usize, seed: u64) -> Statevector {
    Statevector::from_amplitudes(oracle::random_state(n, &mut rng_from_seed(seed))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_is_preserved(n in 1usize..=12, seed in any::<u64>(), gates in prop::collection::vec(gate_strategy(12), 0..100)) {
        let mut s = random_start(n, seed);
        for (g, t) in gates {
            let t: Vec<usize> = t.iter().map(|q| q % n).collect();
            if t.len() == 2 && t[0] == t[1] {
                continue;
            }
            s.apply(g, &t).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gate_then_inverse_is_identity(n in 2usize..=6, seed in any::<u64>(), (g, t) in gate_strategy(6)) {
        let t: Vec<usize> = if t.len() == 2 { vec![t[0] % n, (t[0] % n + 1) % n] } else { vec![t[0] % n] };
        let start = random_start(n, seed);
        let mut s = start.clone();
        s.apply(g, &t).unwrap();
        s.apply(g.inverse(), &t).unwrap();
        for (a, b) in s.amplitudes().iter().zip(start.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn pauli_expectations_are_bounded(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let s = random_start(n, seed ^ 1);
        let obs = Observable::new(oracle::random_pauli_string(n, &mut rng)).unwrap();
        prop_assert!(s.expectation(&obs).unwrap().abs() <= 1.0 + 1e-10);
    }

    #[test]
    fn gate_matrices_are_unitary(k in 0usize..7, theta in -10.0..10.0f64) {
        let m = ALL_GATES[k](theta).matrix().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|l| m[i][l] * m[j][l].conj()).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn apply_validates_targets() {
    let mut s = Statevector::new(3).unwrap();
    assert!(matches!(
        s.apply(Gate::X, &[3]),
        Err(Error::InvalidTarget(_))
    ));
    assert!(matches!(
        s.apply(Gate::Cnot, &[0]),
        Err(Error::InvalidTarget(_))
    ));
    assert!(matches!(
        s.apply(Gate::Cnot, &[2, 2]),
        Err(Error::InvalidTarget(_))
    ));
    assert!(matches!(
        s.expectation(&Observable::z(5)),
        Err(Error::InvalidTarget(_))
    ));
}
