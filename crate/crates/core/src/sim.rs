//! Exact statevector simulation.
//!
//! Bit order: qubit 0 is the most significant bit of the basis index, so the
//! ket `|q0 q1 ... q(n-1)>` sits at index `q0 * 2^(n-1) + ... + q(n-1)`.
//! Gates act in place through strided amplitude updates; no operator matrix
//! larger than 2x2 is ever built.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on simulated qubits (2^16 amplitudes, about 1 MiB).
pub const DEFAULT_MAX_QUBITS: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A gate with its angle (if any) already bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    /// Targets are `(control, target)`.
    Cnot,
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot => 2,
            _ => 1,
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rx(t) => Gate::Rx(-t),
            Gate::Ry(t) => Gate::Ry(-t),
            Gate::Rz(t) => Gate::Rz(-t),
            g => g,
        }
    }

    /// The 2x2 unitary of a single-qubit gate, row-major. `None` for CNOT.
    pub fn matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = match *self {
            Gate::H => [[c(s), c(s)], [c(s), c(-s)]],
            Gate::X => [[ZERO, ONE], [ONE, ZERO]],
            Gate::Y => [[ZERO, -I], [I, ZERO]],
            Gate::Z => [[ONE, ZERO], [ZERO, -ONE]],
            Gate::Rx(t) => {
                let (sn, cs) = (t / 2.0).sin_cos();
                [[c(cs), -I * sn], [-I * sn, c(cs)]]
            }
            Gate::Ry(t) => {
                let (sn, cs) = (t / 2.0).sin_cos();
                [[c(cs), c(-sn)], [c(sn), c(cs)]]
            }
            Gate::Rz(t) => {
                let half = t / 2.0;
                [
                    [Complex64::from_polar(1.0, -half), ZERO],
                    [ZERO, Complex64::from_polar(1.0, half)],
                ]
            }
            Gate::Cnot => return None,
        };
        Some(m)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// One factor of a Pauli string, as written in documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliFactor {
    pub qubit: usize,
    pub pauli: Pauli,
}

/// A tensor product of single-qubit Paulis; identity on unlisted qubits.
/// Serializes as a list of [`PauliFactor`]s.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<PauliFactor>", into = "Vec<PauliFactor>")]
pub struct Observable {
    factors: Vec<(usize, Pauli)>,
}

impl Observable {
    pub fn new(factors: Vec<(usize, Pauli)>) -> Result<Self> {
        for (i, (q, _)) in factors.iter().enumerate() {
            if factors[..i].iter().any(|(p, _)| p == q) {
                return Err(Error::InvalidTarget(format!(
                    "qubit {q} repeated in observable"
                )));
            }
        }
        Ok(Observable { factors })
    }

    pub fn z(qubit: usize) -> Self {
        Observable {
            factors: vec![(qubit, Pauli::Z)],
        }
    }

    /// `Z` on each of the first `n` qubits, one observable per qubit.
    pub fn z_each(n: usize) -> Vec<Self> {
        (0..n).map(Observable::z).collect()
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.iter().map(|(q, _)| *q).max()
    }
}

impl TryFrom<Vec<PauliFactor>> for Observable {
    type Error = Error;

    fn try_from(f: Vec<PauliFactor>) -> Result<Self> {
        Observable::new(f.into_iter().map(|p| (p.qubit, p.pauli)).collect())
    }
}

impl From<Observable> for Vec<PauliFactor> {
    fn from(o: Observable) -> Self {
        o.factors
            .into_iter()
            .map(|(qubit, pauli)| PauliFactor { qubit, pauli })
            .collect()
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        for (k, (q, p)) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p:?}{q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `n_qubits` qubits, bounded by [`DEFAULT_MAX_QUBITS`].
    pub fn new(n_qubits: usize) -> Result<Self> {
        Self::with_max_qubits(n_qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn with_max_qubits(n_qubits: usize, max: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > max {
            return Err(Error::InvalidSize { n: n_qubits, max });
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Statevector { n_qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::new(n_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::InvalidTarget(format!(
                "basis index {index} on {n_qubits} qubits"
            )));
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    /// Wraps raw amplitudes. The length must be a power of two; the vector is
    /// renormalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidSize {
                n: len,
                max: 1 << DEFAULT_MAX_QUBITS,
            });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::InvalidSize {
                n: n_qubits,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidCount("amplitudes have zero norm".into()));
        }
        Ok(Statevector {
            n_qubits,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Shape(format!(
                "inner product of {}-qubit and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Statevector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn stride(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_targets(&self, gate: &Gate, targets: &[usize]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(Error::InvalidTarget(format!(
                "{gate:?} takes {} target(s), got {}",
                gate.arity(),
                targets.len()
            )));
        }
        for (i, &q) in targets.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::InvalidTarget(format!(
                    "qubit {q} out of range for {} qubits",
                    self.n_qubits
                )));
            }
            if targets[..i].contains(&q) {
                return Err(Error::InvalidTarget(format!("duplicate target qubit {q}")));
            }
        }
        Ok(())
    }

    /// Applies `gate` on `targets` in place.
    pub fn apply(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        self.check_targets(&gate, targets)?;
        match gate.matrix() {
            Some(m) => self.apply_1q(&m, targets[0]),
            None => self.apply_cnot(targets[0], targets[1]),
        }
        Ok(())
    }

    fn apply_1q(&mut self, m: &[[Complex64; 2]; 2], qubit: usize) {
        let s = self.stride(qubit);
        for block in self.amps.chunks_exact_mut(2 * s) {
            let (lo, hi) = block.split_at_mut(s);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cm = self.stride(control);
        let tm = self.stride(target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    /// `<psi|P|psi>` for a Pauli string `P`.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        let (mut xmask, mut phase_mask, mut n_y) = (0usize, 0usize, 0u32);
        for &(q, p) in obs.factors() {
            if q >= self.n_qubits {
                return Err(Error::InvalidTarget(format!(
                    "observable qubit {q} out of range for {} qubits",
                    self.n_qubits
                )));
            }
            let bit = self.stride(q);
            match p {
                Pauli::X => xmask |= bit,
                Pauli::Y => {
                    xmask |= bit;
                    phase_mask |= bit;
                    n_y += 1;
                }
                Pauli::Z => phase_mask |= bit,
            }
        }
        // P|i> = i^{n_y} (-1)^{popcount(i & phase_mask)} |i ^ xmask>
        let mut acc = ZERO;
        for (i, a) in self.amps.iter().enumerate() {
            let term = self.amps[i ^ xmask].conj() * a;
            if (i & phase_mask).count_ones() % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let global = match n_y % 4 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        Ok((global * acc).re)
    }

    /// `|amplitude_i|^2` for every basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Samples `shots` measurements in the computational basis. Keys are
    /// bitstrings with qubit 0 leftmost.
    pub fn sample_shots<R: Rng + ?Sized>(
        &self,
        shots: u64,
        rng: &mut R,
    ) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::InvalidCount("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for p in self.probabilities() {
            acc += p;
            cdf.push(acc);
        }
        let total = acc;
        let mut hist = vec![0u64; self.amps.len()];
        for _ in 0..shots {
            let u = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(self.amps.len() - 1);
            hist[idx] += 1;
        }
        Ok(hist
            .into_iter()
            .enumerate()
            .filter(|(_, n)| *n > 0)
            .map(|(i, n)| (format!("{:0width$b}", i, width = self.n_qubits), n))
            .collect())
    }
}
