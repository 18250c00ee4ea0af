//! Parameterized circuit IR.
//!
//! A [`Circuit`] is an ordered op list over `n_qubits` where each rotation
//! angle is bound to a constant, an input slot `x[i]` or a variational slot
//! `theta[k]`, plus a list of measured Pauli observables. Running a circuit
//! returns one expectation per observable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::par_map;
use crate::sim::{Gate, Observable, PauliFactor, Statevector, DEFAULT_MAX_QUBITS};

/// Version tag written into circuit documents.
pub const FORMAT_VERSION: u32 = 1;

/// Keep per-op prefix snapshots for shift evaluations up to this width.
const SNAPSHOT_MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    #[serde(rename = "RX")]
    Rx,
    #[serde(rename = "RY")]
    Ry,
    #[serde(rename = "RZ")]
    Rz,
    #[serde(rename = "CNOT")]
    Cnot,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn arity(self) -> usize {
        if self == GateKind::Cnot {
            2
        } else {
            1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cnot => "CNOT",
        }
    }

    fn bind(self, angle: f64) -> Gate {
        match self {
            GateKind::H => Gate::H,
            GateKind::X => Gate::X,
            GateKind::Y => Gate::Y,
            GateKind::Z => Gate::Z,
            GateKind::Rx => Gate::Rx(angle),
            GateKind::Ry => Gate::Ry(angle),
            GateKind::Rz => Gate::Rz(angle),
            GateKind::Cnot => Gate::Cnot,
        }
    }
}

/// Source of a rotation angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Angle {
    Const(f64),
    Input(usize),
    Param(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Op {
    #[serde(rename = "gate")]
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<Angle>,
}

impl Op {
    pub fn fixed(kind: GateKind, targets: Vec<usize>) -> Self {
        Op {
            kind,
            targets,
            angle: None,
        }
    }

    pub fn rot(kind: GateKind, qubit: usize, angle: Angle) -> Self {
        Op {
            kind,
            targets: vec![qubit],
            angle: Some(angle),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Op::fixed(GateKind::Cnot, vec![control, target])
    }
}

/// Data-encoding block placed before the variational layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// Hadamard on every qubit, then `RY(x_i)` on qubit `i`.
    HadamardAngle,
    /// `RY(x_i)` on qubit `i`, no Hadamard wall.
    Angle,
    /// `RX(x_i)` on qubit `i`, no Hadamard wall.
    AngleX,
    /// `RZ(x_i)` on qubit `i`, no Hadamard wall.
    AngleZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Entangler {
    /// CNOT `i -> i+1 mod n`.
    Ring,
    /// CNOT `i -> i+1` for `i < n-1`.
    Chain,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitDoc", into = "CircuitDoc")]
pub struct Circuit {
    n_qubits: usize,
    input_dim: usize,
    n_params: usize,
    ops: Vec<Op>,
    observables: Vec<Observable>,
}

/// Partial derivatives of a readout vector from shifted circuit runs.
///
/// `d_params[k][j]` is `d value[j] / d theta[k]`; `d_inputs[i][j]` is
/// `d value[j] / d x[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub value: Vec<f64>,
    pub d_params: Vec<Vec<f64>>,
    pub d_inputs: Vec<Vec<f64>>,
}

impl Jacobian {
    /// `sum_j cot[j] * d value[j] / d theta[k]` for every `k`.
    pub fn vjp_params(&self, cot: &[f64]) -> Vec<f64> {
        vjp(&self.d_params, cot)
    }

    pub fn vjp_inputs(&self, cot: &[f64]) -> Vec<f64> {
        vjp(&self.d_inputs, cot)
    }
}

fn vjp(rows: &[Vec<f64>], cot: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|r| r.iter().zip(cot).map(|(a, b)| a * b).sum())
        .collect()
}

impl Circuit {
    pub fn new(n_qubits: usize, input_dim: usize, n_params: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::InvalidSize {
                n: n_qubits,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        Ok(Circuit {
            n_qubits,
            input_dim,
            n_params,
            ops: Vec::new(),
            observables: Vec::new(),
        })
    }

    /// Builds and validates a circuit from its parts.
    pub fn from_parts(
        n_qubits: usize,
        input_dim: usize,
        n_params: usize,
        ops: Vec<Op>,
        observables: Vec<Observable>,
    ) -> Result<Self> {
        let mut c = Circuit::new(n_qubits, input_dim, n_params)?;
        for op in ops {
            c.push(op)?;
        }
        c.set_observables(observables)?;
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
    pub fn n_params(&self) -> usize {
        self.n_params
    }
    pub fn ops(&self) -> &[Op] {
        &self.ops
    }
    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    fn check_op(&self, op: &Op) -> std::result::Result<(), String> {
        if op.targets.len() != op.kind.arity() {
            return Err(format!(
                "{} takes {} target(s), got {}",
                op.kind.name(),
                op.kind.arity(),
                op.targets.len()
            ));
        }
        for (i, &q) in op.targets.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(format!(
                    "target {q} out of range for {} qubits",
                    self.n_qubits
                ));
            }
            if op.targets[..i].contains(&q) {
                return Err(format!("duplicate target {q}"));
            }
        }
        match (op.kind.is_rotation(), op.angle) {
            (true, None) => Err(format!("{} needs an angle", op.kind.name())),
            (false, Some(_)) => Err(format!("{} takes no angle", op.kind.name())),
            (_, Some(Angle::Input(i))) if i >= self.input_dim => Err(format!(
                "input slot {i} out of range (input_dim {})",
                self.input_dim
            )),
            (_, Some(Angle::Param(k))) if k >= self.n_params => Err(format!(
                "param slot {k} out of range (n_params {})",
                self.n_params
            )),
            _ => Ok(()),
        }
    }

    pub fn push(&mut self, op: Op) -> Result<&mut Self> {
        self.check_op(&op).map_err(Error::InvalidTarget)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn set_observables(&mut self, observables: Vec<Observable>) -> Result<&mut Self> {
        for o in &observables {
            if o.max_qubit().is_some_and(|q| q >= self.n_qubits) {
                return Err(Error::InvalidTarget(format!(
                    "observable {o} out of range for {} qubits",
                    self.n_qubits
                )));
            }
        }
        self.observables = observables;
        Ok(self)
    }

    /// Appends `other`'s ops with its parameter slots shifted past ours and
    /// its input slots kept as-is. Observables are left unchanged.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Shape(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        let offset = self.n_params;
        self.n_params += other.n_params;
        self.input_dim = self.input_dim.max(other.input_dim);
        for op in &other.ops {
            let mut op = op.clone();
            if let Some(Angle::Param(k)) = op.angle {
                op.angle = Some(Angle::Param(k + offset));
            }
            self.ops.push(op);
        }
        Ok(())
    }

    /// A copy with `prefix` executed before the existing ops.
    pub fn prepended(&self, prefix: &[Op]) -> Result<Circuit> {
        let mut c = Circuit::new(self.n_qubits, self.input_dim, self.n_params)?;
        for op in prefix.iter().chain(&self.ops) {
            c.push(op.clone())?;
        }
        c.observables = self.observables.clone();
        Ok(c)
    }

    /// Indices of ops whose angle is bound to variational slot `k`.
    pub fn ops_bound_to_param(&self, k: usize) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, op)| op.angle == Some(Angle::Param(k)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Number of ops; the depth measure used by search penalties.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn check_binding(&self, x: &[f64], theta: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::Binding(format!(
                "input has length {}, circuit expects {}",
                x.len(),
                self.input_dim
            )));
        }
        if theta.len() != self.n_params {
            return Err(Error::Binding(format!(
                "parameter vector has length {}, circuit expects {}",
                theta.len(),
                self.n_params
            )));
        }
        Ok(())
    }

    fn angle_of(op: &Op, x: &[f64], theta: &[f64]) -> f64 {
        match op.angle {
            None => 0.0,
            Some(Angle::Const(v)) => v,
            Some(Angle::Input(i)) => x[i],
            Some(Angle::Param(k)) => theta[k],
        }
    }

    fn apply_op(state: &mut Statevector, op: &Op, angle: f64) {
        // Ops are validated on insertion, so targets are always in range.
        state
            .apply(op.kind.bind(angle), &op.targets)
            .expect("validated op");
    }

    fn check_init(&self, init: &Statevector) -> Result<()> {
        if init.n_qubits() != self.n_qubits {
            return Err(Error::Shape(format!(
                "initial state has {} qubits, circuit has {}",
                init.n_qubits(),
                self.n_qubits
            )));
        }
        Ok(())
    }

    fn evolve(&self, state: &mut Statevector, from: usize, x: &[f64], theta: &[f64]) {
        for op in &self.ops[from..] {
            Self::apply_op(state, op, Self::angle_of(op, x, theta));
        }
    }

    /// Final state starting from `|0...0>`.
    pub fn state(&self, x: &[f64], theta: &[f64]) -> Result<Statevector> {
        self.state_from(Statevector::new(self.n_qubits)?, x, theta)
    }

    pub fn state_from(
        &self,
        mut init: Statevector,
        x: &[f64],
        theta: &[f64],
    ) -> Result<Statevector> {
        self.check_binding(x, theta)?;
        self.check_init(&init)?;
        self.evolve(&mut init, 0, x, theta);
        Ok(init)
    }

    /// Expectation of every observable on `state`.
    pub fn measure(&self, state: &Statevector) -> Vec<f64> {
        self.observables
            .iter()
            .map(|o| state.expectation(o).expect("validated observable"))
            .collect()
    }

    /// `f(x; theta) = (<B_1>, ..., <B_m>)`.
    pub fn run(&self, x: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        Ok(self.measure(&self.state(x, theta)?))
    }

    /// Runs with op `op_index`'s angle offset by `delta`.
    pub fn state_shifted(
        &self,
        init: Option<&Statevector>,
        x: &[f64],
        theta: &[f64],
        op_index: usize,
        delta: f64,
    ) -> Result<Statevector> {
        self.check_binding(x, theta)?;
        let mut state = match init {
            Some(s) => {
                self.check_init(s)?;
                s.clone()
            }
            None => Statevector::new(self.n_qubits)?,
        };
        for (i, op) in self.ops.iter().enumerate() {
            let mut a = Self::angle_of(op, x, theta);
            if i == op_index {
                a += delta;
            }
            Self::apply_op(&mut state, op, a);
        }
        Ok(state)
    }

    /// Parameter-shift Jacobian of the observables.
    pub fn jacobian(&self, x: &[f64], theta: &[f64]) -> Result<Jacobian> {
        self.shift_jacobian(None, x, theta, |s| self.measure(s))
    }

    /// Parameter-shift Jacobian of an arbitrary readout that is an
    /// expectation of some Hermitian operator (observables, basis-state
    /// probabilities, overlaps with a fixed state).
    ///
    /// Every op bound to an input or variational slot is evaluated at
    /// `angle +/- pi/2`; contributions of repeated slots add up.
    pub fn shift_jacobian<F>(
        &self,
        init: Option<&Statevector>,
        x: &[f64],
        theta: &[f64],
        readout: F,
    ) -> Result<Jacobian>
    where
        F: Fn(&Statevector) -> Vec<f64> + Sync,
    {
        self.check_binding(x, theta)?;
        let start = match init {
            Some(s) => {
                self.check_init(s)?;
                s.clone()
            }
            None => Statevector::new(self.n_qubits)?,
        };
        let shifted: Vec<usize> = self
            .ops
            .iter()
            .enumerate()
            .filter(|(_, op)| matches!(op.angle, Some(Angle::Input(_)) | Some(Angle::Param(_))))
            .map(|(i, _)| i)
            .collect();

        // Snapshot the state right before each shifted op.
        let snapshots: Option<Vec<Statevector>> =
            (self.n_qubits <= SNAPSHOT_MAX_QUBITS).then(|| {
                let mut snaps = Vec::with_capacity(shifted.len());
                let mut state = start.clone();
                let mut next = 0;
                for (i, op) in self.ops.iter().enumerate() {
                    if next < shifted.len() && shifted[next] == i {
                        snaps.push(state.clone());
                        next += 1;
                    }
                    Self::apply_op(&mut state, op, Self::angle_of(op, x, theta));
                }
                snaps
            });

        let mut value_state = start.clone();
        self.evolve(&mut value_state, 0, x, theta);
        let value = readout(&value_state);

        let jobs: Vec<(usize, usize)> = shifted.iter().copied().enumerate().collect();
        let half_pi = std::f64::consts::FRAC_PI_2;
        let diffs: Vec<Vec<f64>> = par_map(&jobs, |&(j, op_index)| {
            let op = &self.ops[op_index];
            let base = Self::angle_of(op, x, theta);
            let eval = |delta: f64| {
                let mut state = match &snapshots {
                    Some(s) => s[j].clone(),
                    None => {
                        let mut s = start.clone();
                        for prev in &self.ops[..op_index] {
                            Self::apply_op(&mut s, prev, Self::angle_of(prev, x, theta));
                        }
                        s
                    }
                };
                Self::apply_op(&mut state, op, base + delta);
                self.evolve(&mut state, op_index + 1, x, theta);
                readout(&state)
            };
            let plus = eval(half_pi);
            let minus = eval(-half_pi);
            plus.iter()
                .zip(&minus)
                .map(|(p, m)| (p - m) / 2.0)
                .collect()
        });

        let m = value.len();
        let mut d_params = vec![vec![0.0; m]; self.n_params];
        let mut d_inputs = vec![vec![0.0; m]; self.input_dim];
        for (&op_index, d) in shifted.iter().zip(&diffs) {
            let row = match self.ops[op_index].angle {
                Some(Angle::Param(k)) => &mut d_params[k],
                Some(Angle::Input(i)) => &mut d_inputs[i],
                _ => unreachable!(),
            };
            for (r, v) in row.iter_mut().zip(d) {
                *r += v;
            }
        }
        Ok(Jacobian {
            value,
            d_params,
            d_inputs,
        })
    }

    /// Serializes to the versioned JSON circuit document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let doc: CircuitDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        doc.into_circuit()
    }
}

impl From<Circuit> for CircuitDoc {
    fn from(c: Circuit) -> Self {
        CircuitDoc {
            version: FORMAT_VERSION,
            n_qubits: c.n_qubits,
            input_dim: c.input_dim,
            n_params: c.n_params,
            observables: c
                .observables
                .iter()
                .map(|o| {
                    o.factors()
                        .iter()
                        .map(|&(qubit, pauli)| PauliFactor { qubit, pauli })
                        .collect()
                })
                .collect(),
            ops: c.ops,
        }
    }
}

impl TryFrom<CircuitDoc> for Circuit {
    type Error = Error;

    fn try_from(doc: CircuitDoc) -> Result<Self> {
        doc.into_circuit()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    version: u32,
    n_qubits: usize,
    #[serde(default)]
    input_dim: usize,
    #[serde(default)]
    n_params: usize,
    ops: Vec<Op>,
    #[serde(default)]
    observables: Vec<Vec<PauliFactor>>,
}

impl CircuitDoc {
    fn into_circuit(self) -> Result<Circuit> {
        let parse_err = |location: String, message: String| Error::Parse { location, message };
        if self.version != FORMAT_VERSION {
            return Err(parse_err(
                "version".into(),
                format!(
                    "unsupported version {} (expected {FORMAT_VERSION})",
                    self.version
                ),
            ));
        }
        let mut c = Circuit::new(self.n_qubits, self.input_dim, self.n_params)
            .map_err(|e| parse_err("n_qubits".into(), e.to_string()))?;
        for (i, op) in self.ops.into_iter().enumerate() {
            c.check_op(&op)
                .map_err(|m| parse_err(format!("ops[{i}]"), m))?;
            c.ops.push(op);
        }
        let mut observables = Vec::with_capacity(self.observables.len());
        for (i, factors) in self.observables.into_iter().enumerate() {
            let obs = Observable::new(factors.into_iter().map(|f| (f.qubit, f.pauli)).collect())
                .map_err(|e| parse_err(format!("observables[{i}]"), e.to_string()))?;
            if obs.max_qubit().is_some_and(|q| q >= c.n_qubits) {
                return Err(parse_err(
                    format!("observables[{i}]"),
                    format!("qubit out of range for {} qubits", c.n_qubits),
                ));
            }
            observables.push(obs);
        }
        c.observables = observables;
        Ok(c)
    }
}

/// Layered variational circuit: encoding block, then `n_layers` x
/// (entangler + `RY(theta)`, `RZ(theta)` on every qubit), measured with `Z`
/// on every qubit. Parameter count is `2 * n_qubits * n_layers`; layer `l`,
/// qubit `q` owns slots `2(l n + q)` (RY) and `2(l n + q) + 1` (RZ).
pub fn build_layered(
    n_qubits: usize,
    input_dim: usize,
    n_layers: usize,
    encoding: Encoding,
    entangler: Entangler,
) -> Result<Circuit> {
    if input_dim > n_qubits {
        return Err(Error::EncodingCapacity {
            input_dim,
            n_qubits,
        });
    }
    let mut c = Circuit::new(n_qubits, input_dim, 2 * n_qubits * n_layers)?;
    if encoding == Encoding::HadamardAngle {
        for q in 0..n_qubits {
            c.push(Op::fixed(GateKind::H, vec![q]))?;
        }
    }
    let enc_kind = match encoding {
        Encoding::HadamardAngle | Encoding::Angle => GateKind::Ry,
        Encoding::AngleX => GateKind::Rx,
        Encoding::AngleZ => GateKind::Rz,
    };
    for i in 0..input_dim {
        c.push(Op::rot(enc_kind, i, Angle::Input(i)))?;
    }
    for layer in 0..n_layers {
        push_entangler(&mut c, entangler)?;
        for q in 0..n_qubits {
            let k = 2 * (layer * n_qubits + q);
            c.push(Op::rot(GateKind::Ry, q, Angle::Param(k)))?;
            c.push(Op::rot(GateKind::Rz, q, Angle::Param(k + 1)))?;
        }
    }
    c.set_observables(Observable::z_each(n_qubits))?;
    Ok(c)
}

fn push_entangler(c: &mut Circuit, entangler: Entangler) -> Result<()> {
    let n = c.n_qubits();
    match entangler {
        Entangler::Ring if n > 1 => {
            for q in 0..n {
                c.push(Op::cnot(q, (q + 1) % n))?;
            }
        }
        Entangler::Chain | Entangler::Ring => {
            for q in 0..n.saturating_sub(1) {
                c.push(Op::cnot(q, q + 1))?;
            }
        }
        Entangler::None => {}
    }
    Ok(())
}
