//! Quantum LSTM cell.
//!
//! Each of the four gate networks is a variational circuit reading the
//! concatenation `v_t = [h_{t-1}; x_t]` (angle-encoded as `atan(v_i)`) and
//! returning `hidden_dim` Pauli-Z expectations:
//!
//! ```text
//! f = sigmoid(QNN1(v))   i = sigmoid(QNN2(v))   g = tanh(QNN3(v))
//! c = f * c_prev + i * g
//! o = sigmoid(QNN4(v))   h = o * tanh(c)
//! ```

use serde::{Deserialize, Serialize};

use crate::autodiff::Optimizer;
use crate::circuit::{build_layered, Encoding, Entangler, Jacobian};
use crate::data::SequenceSample;
use crate::error::{check_len, Error, Result};
use crate::models::vqc::VqcModel;
use crate::nn::{mse, sigmoid, Activation, Mlp};
use crate::rng::{uniform_vec, SimRng};

pub const FORGET: usize = 0;
pub const INPUT: usize = 1;
pub const CANDIDATE: usize = 2;
pub const OUTPUT: usize = 3;

/// Default bound on `|c|`.
pub const DEFAULT_CELL_CLIP: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QlstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl QlstmState {
    pub fn zeros(hidden_dim: usize) -> Self {
        QlstmState {
            h: vec![0.0; hidden_dim],
            c: vec![0.0; hidden_dim],
        }
    }
}

/// Gate activations of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct GateValues {
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
    /// Cell value before clipping.
    pub c_raw: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QlstmShape {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub hidden_dim: usize,
    pub input_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qlstm {
    /// Forget, input, candidate and output networks, in that order.
    pub gates: [VqcModel; 4],
    pub hidden_dim: usize,
    pub input_dim: usize,
    pub cell_clip: Option<f64>,
}

/// Cell arithmetic on raw gate-network outputs.
pub fn cell_update(
    raw: &[Vec<f64>; 4],
    prev: &QlstmState,
    clip: Option<f64>,
) -> (QlstmState, GateValues) {
    let f: Vec<f64> = raw[FORGET].iter().map(|&a| sigmoid(a)).collect();
    let i: Vec<f64> = raw[INPUT].iter().map(|&a| sigmoid(a)).collect();
    let g: Vec<f64> = raw[CANDIDATE].iter().map(|&a| a.tanh()).collect();
    let o: Vec<f64> = raw[OUTPUT].iter().map(|&a| sigmoid(a)).collect();
    let c_raw: Vec<f64> = (0..f.len())
        .map(|k| f[k] * prev.c[k] + i[k] * g[k])
        .collect();
    let c: Vec<f64> = match clip {
        Some(b) => c_raw.iter().map(|v| v.clamp(-b, b)).collect(),
        None => c_raw.clone(),
    };
    let h = o.iter().zip(&c).map(|(o, c)| o * c.tanh()).collect();
    (QlstmState { h, c }, GateValues { f, i, g, o, c_raw })
}

fn atan_encode(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.atan()).collect()
}

impl Qlstm {
    pub fn new(shape: QlstmShape, rng: &mut SimRng, half_width: f64) -> Result<Self> {
        let QlstmShape {
            n_qubits,
            n_layers,
            hidden_dim,
            input_dim,
        } = shape;
        if hidden_dim == 0 || hidden_dim > n_qubits {
            return Err(Error::Shape(format!(
                "hidden_dim {hidden_dim} must be in 1..={n_qubits} (one Z readout per qubit)"
            )));
        }
        let mut circuit = build_layered(
            n_qubits,
            hidden_dim + input_dim,
            n_layers,
            Encoding::HadamardAngle,
            Entangler::Ring,
        )?;
        circuit.set_observables(crate::sim::Observable::z_each(hidden_dim))?;
        let make = |rng: &mut SimRng| VqcModel::random(circuit.clone(), rng, half_width);
        let gates = [make(rng), make(rng), make(rng), make(rng)];
        Ok(Qlstm {
            gates,
            hidden_dim,
            input_dim,
            cell_clip: Some(DEFAULT_CELL_CLIP),
        })
    }

    pub fn n_params(&self) -> usize {
        self.gates.iter().map(|g| g.theta.len()).sum()
    }

    fn concat(&self, prev: &QlstmState, x: &[f64]) -> Result<Vec<f64>> {
        check_len("qlstm input", x.len(), self.input_dim)?;
        check_len("qlstm hidden state", prev.h.len(), self.hidden_dim)?;
        check_len("qlstm cell state", prev.c.len(), self.hidden_dim)?;
        Ok(prev.h.iter().chain(x).copied().collect())
    }

    /// One step with caller-supplied gate outputs: `gate(k, v)` returns the
    /// raw output of network `k` on `v_t`.
    pub fn step_with<F>(
        &self,
        x: &[f64],
        prev: &QlstmState,
        mut gate: F,
    ) -> Result<(QlstmState, GateValues)>
    where
        F: FnMut(usize, &[f64]) -> Result<Vec<f64>>,
    {
        let v = self.concat(prev, x)?;
        let mut raw: [Vec<f64>; 4] = Default::default();
        for (k, r) in raw.iter_mut().enumerate() {
            *r = gate(k, &v)?;
            check_len("gate output", r.len(), self.hidden_dim)?;
        }
        Ok(cell_update(&raw, prev, self.cell_clip))
    }

    pub fn step(&self, x: &[f64], prev: &QlstmState) -> Result<QlstmState> {
        Ok(self
            .step_with(x, prev, |k, v| self.gates[k].forward(&atan_encode(v)))?
            .0)
    }

    /// States after every step, starting from zeros.
    pub fn trajectory(&self, sequence: &[Vec<f64>]) -> Result<Vec<QlstmState>> {
        let mut state = QlstmState::zeros(self.hidden_dim);
        let mut out = Vec::with_capacity(sequence.len());
        for x in sequence {
            state = self.step(x, &state)?;
            out.push(state.clone());
        }
        Ok(out)
    }
}

/// QLSTM followed by an affine readout `y_t = W h_t + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QlstmRegressor {
    pub cell: Qlstm,
    pub readout: Mlp,
    pub readout_weights: Vec<f64>,
}

/// Gradient of the unrolled loss, split by owner.
#[derive(Debug, Clone, PartialEq)]
pub struct QlstmGrad {
    pub gates: [Vec<f64>; 4],
    pub readout: Vec<f64>,
}

impl QlstmGrad {
    pub fn flatten(&self) -> Vec<f64> {
        self.gates
            .iter()
            .flatten()
            .chain(&self.readout)
            .copied()
            .collect()
    }
}

struct StepTrace {
    v: Vec<f64>,
    jac: [Jacobian; 4],
    gates: GateValues,
    prev: QlstmState,
    state: QlstmState,
}

impl QlstmRegressor {
    pub fn new(
        shape: QlstmShape,
        output_dim: usize,
        rng: &mut SimRng,
        half_width: f64,
    ) -> Result<Self> {
        let cell = Qlstm::new(shape, rng, half_width)?;
        let readout = Mlp::new(
            vec![shape.hidden_dim, output_dim],
            Activation::Tanh,
            Activation::Identity,
        )?;
        let readout_weights = uniform_vec(rng, readout.n_weights(), 0.5);
        Ok(QlstmRegressor {
            cell,
            readout,
            readout_weights,
        })
    }

    pub fn n_params(&self) -> usize {
        self.cell.n_params() + self.readout_weights.len()
    }

    /// Flat parameter vector: the four gate networks, then the readout.
    pub fn params(&self) -> Vec<f64> {
        self.cell
            .gates
            .iter()
            .flat_map(|g| g.theta.iter())
            .chain(&self.readout_weights)
            .copied()
            .collect()
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        check_len("qlstm parameters", flat.len(), self.n_params())?;
        let mut off = 0;
        for g in self.cell.gates.iter_mut() {
            let n = g.theta.len();
            g.theta.copy_from_slice(&flat[off..off + n]);
            off += n;
        }
        self.readout_weights.copy_from_slice(&flat[off..]);
        Ok(())
    }

    /// Readout after every step.
    pub fn predict(&self, sequence: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.cell
            .trajectory(sequence)?
            .iter()
            .map(|s| self.readout.forward(&self.readout_weights, &s.h))
            .collect()
    }

    fn forward_trace(&self, sequence: &[Vec<f64>]) -> Result<Vec<StepTrace>> {
        let mut prev = QlstmState::zeros(self.cell.hidden_dim);
        let mut traces = Vec::with_capacity(sequence.len());
        for x in sequence {
            let v = self.cell.concat(&prev, x)?;
            let enc = atan_encode(&v);
            let mut jac = Vec::with_capacity(4);
            for g in &self.cell.gates {
                jac.push(g.jacobian(&enc)?);
            }
            let jac: [Jacobian; 4] = jac.try_into().expect("four gates");
            let raw = [
                jac[0].value.clone(),
                jac[1].value.clone(),
                jac[2].value.clone(),
                jac[3].value.clone(),
            ];
            let (state, gates) = cell_update(&raw, &prev, self.cell.cell_clip);
            traces.push(StepTrace {
                v,
                jac,
                gates,
                prev: prev.clone(),
                state: state.clone(),
            });
            prev = state;
        }
        Ok(traces)
    }

    /// Loss `sum_t mse(y_t, target_t)` over the steps that carry a target,
    /// and its gradient by backpropagation through time. Circuit partials
    /// come from parameter shift; the gate arithmetic, the `atan` encoding
    /// and the readout are differentiated analytically.
    pub fn bptt_grad(
        &self,
        sequence: &[Vec<f64>],
        targets: &[Option<Vec<f64>>],
    ) -> Result<(f64, QlstmGrad)> {
        if sequence.is_empty() {
            return Err(Error::Empty("sequence".into()));
        }
        check_len("targets", targets.len(), sequence.len())?;
        let traces = self.forward_trace(sequence)?;
        let hd = self.cell.hidden_dim;
        let mut grad = QlstmGrad {
            gates: std::array::from_fn(|k| vec![0.0; self.cell.gates[k].theta.len()]),
            readout: vec![0.0; self.readout_weights.len()],
        };
        let mut loss = 0.0;
        let mut dh_next = vec![0.0; hd];
        let mut dc_next = vec![0.0; hd];
        for (t, tr) in traces.iter().enumerate().rev() {
            let mut dh = dh_next.clone();
            if let Some(target) = &targets[t] {
                let y = self.readout.forward(&self.readout_weights, &tr.state.h)?;
                check_len("target", target.len(), y.len())?;
                let (l, dy) = mse(&y, target);
                loss += l;
                let (_, dw, dx) = self
                    .readout
                    .backward(&self.readout_weights, &tr.state.h, &dy)?;
                grad.readout.iter_mut().zip(dw).for_each(|(a, b)| *a += b);
                dh.iter_mut().zip(dx).for_each(|(a, b)| *a += b);
            }
            let GateValues { f, i, g, o, c_raw } = &tr.gates;
            let mut da: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; hd]);
            let mut dc_prev = vec![0.0; hd];
            for k in 0..hd {
                let tc = tr.state.c[k].tanh();
                let d_o = dh[k] * tc;
                let mut dc = dc_next[k] + dh[k] * o[k] * (1.0 - tc * tc);
                if let Some(b) = self.cell.cell_clip {
                    if c_raw[k].abs() > b {
                        dc = 0.0;
                    }
                }
                da[FORGET][k] = dc * tr.prev.c[k] * f[k] * (1.0 - f[k]);
                da[INPUT][k] = dc * g[k] * i[k] * (1.0 - i[k]);
                da[CANDIDATE][k] = dc * i[k] * (1.0 - g[k] * g[k]);
                da[OUTPUT][k] = d_o * o[k] * (1.0 - o[k]);
                dc_prev[k] = dc * f[k];
            }
            let mut d_enc = vec![0.0; tr.v.len()];
            for (k, j) in tr.jac.iter().enumerate() {
                grad.gates[k]
                    .iter_mut()
                    .zip(j.vjp_params(&da[k]))
                    .for_each(|(a, b)| *a += b);
                d_enc
                    .iter_mut()
                    .zip(j.vjp_inputs(&da[k]))
                    .for_each(|(a, b)| *a += b);
            }
            for (k, d) in d_enc.iter().enumerate().take(hd) {
                dh_next[k] = d / (1.0 + tr.v[k] * tr.v[k]);
            }
            dc_next = dc_prev;
        }
        Ok((loss, grad))
    }

    /// Unrolled loss only, for finite-difference checks and evaluation.
    pub fn loss(&self, sequence: &[Vec<f64>], targets: &[Option<Vec<f64>>]) -> Result<f64> {
        check_len("targets", targets.len(), sequence.len())?;
        let preds = self.predict(sequence)?;
        Ok(preds
            .iter()
            .zip(targets)
            .filter_map(|(p, t)| t.as_ref().map(|t| mse(p, t).0))
            .sum())
    }
}

/// Loss on a window with a target on its last step only.
fn window_targets(sample: &SequenceSample) -> Vec<Option<Vec<f64>>> {
    let mut t = vec![None; sample.inputs.len()];
    if let Some(last) = t.last_mut() {
        *last = Some(sample.target.clone());
    }
    t
}

/// Mean last-step loss over `samples`.
pub fn window_loss(model: &QlstmRegressor, samples: &[SequenceSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("no training windows".into()));
    }
    let mut total = 0.0;
    for s in samples {
        total += model.loss(&s.inputs, &window_targets(s))?;
    }
    Ok(total / samples.len() as f64)
}

/// Full-batch training on next-step windows; returns the mean loss before
/// each optimizer step.
pub fn train_windows(
    model: &mut QlstmRegressor,
    samples: &[SequenceSample],
    steps: usize,
    opt: &mut Optimizer,
) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Empty("no training windows".into()));
    }
    let n = samples.len() as f64;
    let mut log = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut grad = vec![0.0; model.n_params()];
        let mut loss = 0.0;
        for s in samples {
            let (l, g) = model.bptt_grad(&s.inputs, &window_targets(s))?;
            loss += l / n;
            grad.iter_mut()
                .zip(g.flatten())
                .for_each(|(a, b)| *a += b / n);
        }
        let mut p = model.params();
        opt.step(&mut p, &grad)?;
        model.set_params(&p)?;
        log.push(loss);
    }
    Ok(log)
}
