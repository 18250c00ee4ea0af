//! Differentiable architecture search: a softmax-weighted ensemble of
//! candidate circuits, each with its own parameters, trained jointly with
//! the mixture logits.

use serde::{Deserialize, Serialize};

use crate::autodiff::Optimizer;
use crate::circuit::Circuit;
use crate::data::Dataset;
use crate::error::{check_len, Error, Result};
use crate::nn::mse;
use crate::par::par_map;
use crate::rng::{stream, uniform_vec};

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|e| e / total).collect()
}

fn check_candidates(candidates: &[Circuit], thetas: &[Vec<f64>], logits: &[f64]) -> Result<usize> {
    let Some(first) = candidates.first() else {
        return Err(Error::Empty("no candidate circuits".into()));
    };
    check_len("per-candidate parameters", thetas.len(), candidates.len())?;
    check_len("structural logits", logits.len(), candidates.len())?;
    let m = first.observables().len();
    for (j, c) in candidates.iter().enumerate() {
        if c.observables().len() != m {
            return Err(Error::Shape(format!(
                "candidate {j} has {} outputs, candidate 0 has {m}",
                c.observables().len()
            )));
        }
    }
    Ok(m)
}

fn mix(outputs: &[Vec<f64>], w: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for (f, wj) in outputs.iter().zip(w) {
        for (o, v) in out.iter_mut().zip(f) {
            *o += wj * v;
        }
    }
    out
}

/// `sum_j softmax(logits)_j * f_j(x; thetas[j])`.
pub fn diffqas_forward(
    candidates: &[Circuit],
    x: &[f64],
    thetas: &[Vec<f64>],
    logits: &[f64],
) -> Result<Vec<f64>> {
    let m = check_candidates(candidates, thetas, logits)?;
    let idx: Vec<usize> = (0..candidates.len()).collect();
    let outputs = par_map(&idx, |&j| candidates[j].run(x, &thetas[j]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(mix(&outputs, &softmax(logits), m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleGrad {
    pub loss: f64,
    pub logits: Vec<f64>,
    pub thetas: Vec<Vec<f64>>,
}

/// Mean squared error of the ensemble over `data` with gradients for the
/// logits (softmax chain rule) and every candidate's parameters
/// (parameter shift).
pub fn ensemble_loss_grad(
    candidates: &[Circuit],
    thetas: &[Vec<f64>],
    logits: &[f64],
    data: &Dataset,
) -> Result<EnsembleGrad> {
    let m = check_candidates(candidates, thetas, logits)?;
    if data.is_empty() {
        return Err(Error::Empty("dataset".into()));
    }
    let w = softmax(logits);
    let n = data.len() as f64;
    let mut grad = EnsembleGrad {
        loss: 0.0,
        logits: vec![0.0; candidates.len()],
        thetas: thetas.iter().map(|t| vec![0.0; t.len()]).collect(),
    };
    let idx: Vec<usize> = (0..candidates.len()).collect();
    for (x, y) in data.iter() {
        let jacs = par_map(&idx, |&j| candidates[j].jacobian(x, &thetas[j]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let outputs: Vec<Vec<f64>> = jacs.iter().map(|j| j.value.clone()).collect();
        let pred = mix(&outputs, &w, m);
        check_len("target", y.len(), m)?;
        let (loss, d_out) = mse(&pred, y);
        grad.loss += loss / n;
        // dL/dw_j = <d_out, f_j>; dw_j/dl_k = w_j (delta_jk - w_k)
        let g: Vec<f64> = outputs
            .iter()
            .map(|f| f.iter().zip(&d_out).map(|(a, b)| a * b).sum())
            .collect();
        let g_bar: f64 = g.iter().zip(&w).map(|(a, b)| a * b).sum();
        for k in 0..candidates.len() {
            grad.logits[k] += w[k] * (g[k] - g_bar) / n;
            let scaled: Vec<f64> = d_out.iter().map(|d| d * w[k] / n).collect();
            for (acc, v) in grad.thetas[k].iter_mut().zip(jacs[k].vjp_params(&scaled)) {
                *acc += v;
            }
        }
    }
    Ok(grad)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffQasConfig {
    pub epochs: usize,
    pub lr: f64,
    /// Learning rate for the structural logits.
    pub logit_lr: f64,
    pub init_half_width: f64,
    pub seed: u64,
}

impl Default for DiffQasConfig {
    fn default() -> Self {
        DiffQasConfig {
            epochs: 60,
            lr: 0.1,
            logit_lr: 0.1,
            init_half_width: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffQasEpoch {
    pub epoch: usize,
    pub loss: f64,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffQasResult {
    pub logits: Vec<f64>,
    pub weights: Vec<f64>,
    pub thetas: Vec<Vec<f64>>,
    /// Candidate with the largest final weight (earliest on ties).
    pub selected: usize,
    pub history: Vec<DiffQasEpoch>,
}

/// Joint full-batch Adam on logits (starting equal) and all candidate
/// parameters (candidate `j` initialized from stream `j` of the seed).
pub fn diffqas_train(
    candidates: &[Circuit],
    data: &Dataset,
    config: &DiffQasConfig,
) -> Result<DiffQasResult> {
    let mut thetas: Vec<Vec<f64>> = candidates
        .iter()
        .enumerate()
        .map(|(j, c)| {
            uniform_vec(
                &mut stream(config.seed, &[j as u64]),
                c.n_params(),
                config.init_half_width,
            )
        })
        .collect();
    diffqas_train_from(
        candidates,
        data,
        config,
        &mut thetas,
        vec![0.0; candidates.len()],
    )
}

/// As [`diffqas_train`] but from explicit starting parameters.
pub fn diffqas_train_from(
    candidates: &[Circuit],
    data: &Dataset,
    config: &DiffQasConfig,
    thetas: &mut [Vec<f64>],
    mut logits: Vec<f64>,
) -> Result<DiffQasResult> {
    check_candidates(candidates, thetas, &logits)?;
    let mut logit_opt = Optimizer::adam(config.logit_lr, logits.len());
    let mut theta_opts: Vec<Optimizer> = thetas
        .iter()
        .map(|t| Optimizer::adam(config.lr, t.len()))
        .collect();
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let g = ensemble_loss_grad(candidates, thetas, &logits, data)?;
        history.push(DiffQasEpoch {
            epoch,
            loss: g.loss,
            weights: softmax(&logits),
        });
        logit_opt.step(&mut logits, &g.logits)?;
        for ((t, gt), opt) in thetas.iter_mut().zip(&g.thetas).zip(theta_opts.iter_mut()) {
            opt.step(t, gt)?;
        }
    }
    let weights = softmax(&logits);
    let selected = crate::rl::agent::argmax(&weights);
    Ok(DiffQasResult {
        logits,
        weights,
        thetas: thetas.to_vec(),
        selected,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_layered, Encoding, Entangler};

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax(&[3.0]), vec![1.0]);
        assert_eq!(softmax(&[0.2, 0.2]), vec![0.5, 0.5]);
        let w = softmax(&[1000.0, 0.0, -5.0]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12 && w[0] > 0.999);
    }

    #[test]
    fn forward_examples() {
        let a = build_layered(2, 2, 1, Encoding::Angle, Entangler::Chain).unwrap();
        let b = build_layered(2, 2, 2, Encoding::AngleX, Entangler::Ring).unwrap();
        let ta = vec![0.3; a.n_params()];
        let tb = vec![-0.7; b.n_params()];
        let x = [0.4, 1.1];
        let fa = a.run(&x, &ta).unwrap();
        let fb = b.run(&x, &tb).unwrap();
        let single = diffqas_forward(std::slice::from_ref(&a), &x, &[ta.clone()], &[-2.0]).unwrap();
        assert_eq!(single, fa);
        let mean = diffqas_forward(&[a.clone(), b.clone()], &x, &[ta, tb], &[0.5, 0.5]).unwrap();
        for i in 0..2 {
            assert!((mean[i] - (fa[i] + fb[i]) / 2.0).abs() < 1e-15);
        }
        let one_out = build_layered(1, 1, 1, Encoding::Angle, Entangler::None).unwrap();
        assert!(matches!(
            diffqas_forward(
                &[a, one_out],
                &x[..1],
                &[vec![0.0; 4], vec![0.0; 2]],
                &[0.0, 0.0]
            ),
            Err(Error::Shape(_))
        ));
    }
}
