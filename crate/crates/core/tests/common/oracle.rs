//! Slow, obviously-correct reference implementations used as test oracles.
//! Nothing here calls the simulator under test.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qmlkit::{Angle, Circuit, GateKind, Op, Pauli};
use rand::Rng;

pub type Matrix = Vec<Vec<C>>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn gate_matrix(kind: GateKind, angle: f64) -> [[C; 2]; 2] {
    let (cs, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        GateKind::H => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
        GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        GateKind::Y => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        GateKind::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        GateKind::Rx => [[c(cs, 0.0), c(0.0, -sn)], [c(0.0, -sn), c(cs, 0.0)]],
        GateKind::Ry => [[c(cs, 0.0), c(-sn, 0.0)], [c(sn, 0.0), c(cs, 0.0)]],
        GateKind::Rz => [[c(cs, -sn), c(0.0, 0.0)], [c(0.0, 0.0), c(cs, sn)]],
        GateKind::Cnot => panic!("CNOT is not a single-qubit gate"),
    }
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn small(m: [[C; 2]; 2]) -> Matrix {
    m.iter().map(|r| r.to_vec()).collect()
}

/// `I x ... x U x ... x I` with qubit 0 as the leftmost factor.
pub fn embed(u: [[C; 2]; 2], qubit: usize, n: usize) -> Matrix {
    let mut out = vec![vec![c(1.0, 0.0)]];
    for q in 0..n {
        let f = if q == qubit { small(u) } else { identity(2) };
        out = kron(&out, &f);
    }
    out
}

/// `|0><0|_c x I + |1><1|_c x X_t` assembled from projectors.
pub fn cnot_matrix(control: usize, target: usize, n: usize) -> Matrix {
    let p0 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
    let p1 = [[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
    let x = gate_matrix(GateKind::X, 0.0);
    let mut a = vec![vec![c(1.0, 0.0)]];
    let mut b = vec![vec![c(1.0, 0.0)]];
    for q in 0..n {
        let (fa, fb) = if q == control {
            (small(p0), small(p1))
        } else if q == target {
            (identity(2), small(x))
        } else {
            (identity(2), identity(2))
        };
        a = kron(&a, &fa);
        b = kron(&b, &fb);
    }
    a.iter()
        .zip(&b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn matvec(m: &Matrix, v: &[C]) -> Vec<C> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn op_matrix(op: &Op, angle: f64, n: usize) -> Matrix {
    match op.kind {
        GateKind::Cnot => cnot_matrix(op.targets[0], op.targets[1], n),
        k => embed(gate_matrix(k, angle), op.targets[0], n),
    }
}

pub fn bound_angle(op: &Op, x: &[f64], theta: &[f64]) -> f64 {
    match op.angle {
        None => 0.0,
        Some(Angle::Const(a)) => a,
        Some(Angle::Input(i)) => x[i],
        Some(Angle::Param(k)) => theta[k],
    }
}

/// Final state by dense matrix-vector products, one full `2^n x 2^n`
/// operator per op.
pub fn dense_state(circuit: &Circuit, x: &[f64], theta: &[f64]) -> Vec<C> {
    let n = circuit.n_qubits();
    let mut psi = vec![c(0.0, 0.0); 1 << n];
    psi[0] = c(1.0, 0.0);
    for op in circuit.ops() {
        psi = matvec(&op_matrix(op, bound_angle(op, x, theta), n), &psi);
    }
    psi
}

pub fn pauli_matrix(p: Pauli) -> [[C; 2]; 2] {
    match p {
        Pauli::X => gate_matrix(GateKind::X, 0.0),
        Pauli::Y => gate_matrix(GateKind::Y, 0.0),
        Pauli::Z => gate_matrix(GateKind::Z, 0.0),
    }
}

pub fn pauli_string_matrix(factors: &[(usize, Pauli)], n: usize) -> Matrix {
    let mut out = vec![vec![c(1.0, 0.0)]];
    for q in 0..n {
        let f = match factors.iter().find(|(fq, _)| *fq == q) {
            Some((_, p)) => small(pauli_matrix(*p)),
            None => identity(2),
        };
        out = kron(&out, &f);
    }
    out
}

/// `<psi| M |psi>` by explicit contraction; returns the full complex value.
pub fn dense_expectation(psi: &[C], m: &Matrix) -> C {
    let mpsi = matvec(m, psi);
    psi.iter().zip(&mpsi).map(|(a, b)| a.conj() * b).sum()
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Vec<C> {
    let v: Vec<C> = (0..1 << n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|a| a / norm).collect()
}

pub fn random_pauli_string<R: Rng>(n: usize, rng: &mut R) -> Vec<(usize, Pauli)> {
    let mut factors = Vec::new();
    for q in 0..n {
        match rng.gen_range(0..4) {
            0 => {}
            1 => factors.push((q, Pauli::X)),
            2 => factors.push((q, Pauli::Y)),
            _ => factors.push((q, Pauli::Z)),
        }
    }
    if factors.is_empty() {
        factors.push((rng.gen_range(0..n), Pauli::Z));
    }
    factors
}

/// Random circuit over every gate kind. Rotations draw their angle from a
/// constant, an input slot or a parameter slot.
pub fn random_circuit<R: Rng>(
    n: usize,
    depth: usize,
    input_dim: usize,
    n_params: usize,
    rng: &mut R,
) -> Circuit {
    let mut circ = Circuit::new(n, input_dim, n_params).unwrap();
    let kinds = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cnot,
    ];
    while circ.len() < depth {
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let op = if kind == GateKind::Cnot {
            if n < 2 {
                continue;
            }
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            Op::cnot(a, b)
        } else if kind.is_rotation() {
            let q = rng.gen_range(0..n);
            let angle = match rng.gen_range(0..3) {
                0 if input_dim > 0 => Angle::Input(rng.gen_range(0..input_dim)),
                1 if n_params > 0 => Angle::Param(rng.gen_range(0..n_params)),
                _ => Angle::Const(rng.gen_range(-4.0..4.0)),
            };
            Op::rot(kind, q, angle)
        } else {
            Op::fixed(kind, vec![rng.gen_range(0..n)])
        };
        circ.push(op).unwrap();
    }
    circ
}

/// Straight-line LSTM cell: gate pre-activations in, `(h, c)` out.
pub fn lstm_cell(
    a_f: &[f64],
    a_i: &[f64],
    a_g: &[f64],
    a_o: &[f64],
    c_prev: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let sig = |z: f64| 1.0 / (1.0 + (-z).exp());
    let mut h = Vec::new();
    let mut c_new = Vec::new();
    for k in 0..c_prev.len() {
        let f = sig(a_f[k]);
        let i = sig(a_i[k]);
        let g = a_g[k].tanh();
        let o = sig(a_o[k]);
        let ck = f * c_prev[k] + i * g;
        c_new.push(ck);
        h.push(o * ck.tanh());
    }
    (h, c_new)
}

/// Deterministic grid from text rows (`S` start, `F` frozen, `H` hole,
/// `G` goal) with actions up, down, left, right; bumping a wall stays put.
pub struct Lake {
    pub rows: Vec<Vec<u8>>,
}

impl Lake {
    pub fn new(rows: &[&str]) -> Self {
        Lake {
            rows: rows.iter().map(|r| r.bytes().collect()).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn n_states(&self) -> usize {
        self.rows.len() * self.width()
    }

    pub fn cell(&self, s: usize) -> u8 {
        self.rows[s / self.width()][s % self.width()]
    }

    pub fn start(&self) -> usize {
        (0..self.n_states())
            .find(|&s| self.cell(s) == b'S')
            .unwrap()
    }

    pub fn terminal(&self, s: usize) -> bool {
        matches!(self.cell(s), b'H' | b'G')
    }

    /// `(next, reward)`.
    pub fn step(&self, s: usize, a: usize) -> (usize, f64) {
        let (w, h) = (self.width() as i64, self.rows.len() as i64);
        let (r, col) = ((s as i64) / w, (s as i64) % w);
        let (dr, dc) = [(-1, 0), (1, 0), (0, -1), (0, 1)][a];
        let (nr, nc) = (r + dr, col + dc);
        let next = if nr < 0 || nr >= h || nc < 0 || nc >= w {
            s
        } else {
            (nr * w + nc) as usize
        };
        (next, if self.cell(next) == b'G' { 1.0 } else { 0.0 })
    }
}

/// Tabular Q-learning with a uniformly random behaviour policy; returns
/// the Q-table.
pub fn tabular_q<R: Rng>(
    lake: &Lake,
    episodes: usize,
    gamma: f64,
    alpha: f64,
    step_limit: usize,
    rng: &mut R,
) -> Vec<[f64; 4]> {
    let mut q = vec![[0.0; 4]; lake.n_states()];
    for _ in 0..episodes {
        let mut s = lake.start();
        for _ in 0..step_limit {
            let a = rng.gen_range(0..4);
            let (next, r) = lake.step(s, a);
            let future = if lake.terminal(next) {
                0.0
            } else {
                q[next].iter().cloned().fold(f64::MIN, f64::max)
            };
            q[s][a] += alpha * (r + gamma * future - q[s][a]);
            s = next;
            if lake.terminal(s) {
                break;
            }
        }
    }
    q
}

/// Follows the greedy policy of `q` from the start; true if it reaches `G`.
pub fn greedy_reaches_goal(lake: &Lake, q: &[[f64; 4]], step_limit: usize) -> bool {
    let mut s = lake.start();
    for _ in 0..step_limit {
        let row = q[s];
        let a = (0..4).fold(0, |best, a| if row[a] > row[best] { a } else { best });
        s = lake.step(s, a).0;
        if lake.terminal(s) {
            return lake.cell(s) == b'G';
        }
    }
    false
}
