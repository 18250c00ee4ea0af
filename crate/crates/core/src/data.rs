//! Toy datasets used by the training commands and tests.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::SimRng;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.inputs
            .iter()
            .map(Vec::as_slice)
            .zip(self.targets.iter().map(Vec::as_slice))
    }

    /// Splits into `k` contiguous, disjoint shards of near-equal size.
    pub fn shards(&self, k: usize) -> Vec<Dataset> {
        let n = self.len();
        (0..k)
            .map(|i| {
                let (lo, hi) = (i * n / k, (i + 1) * n / k);
                Dataset {
                    inputs: self.inputs[lo..hi].to_vec(),
                    targets: self.targets[lo..hi].to_vec(),
                }
            })
            .collect()
    }
}

/// XOR truth table with 0/1 targets.
pub fn xor() -> Dataset {
    Dataset {
        inputs: vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ],
        targets: vec![vec![0.0], vec![1.0], vec![1.0], vec![0.0]],
    }
}

/// Points in `[-1, 1]^2` labelled `sign(x0 + x1)` (as +/-1), keeping only
/// points at least `margin` away from the boundary line.
pub fn separable_2d(n: usize, margin: f64, rng: &mut SimRng) -> Dataset {
    let mut ds = Dataset::default();
    while ds.len() < n {
        let x: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let s = x[0] + x[1];
        if s.abs() / std::f64::consts::SQRT_2 < margin {
            continue;
        }
        ds.inputs.push(x.to_vec());
        ds.targets.push(vec![if s > 0.0 { 1.0 } else { -1.0 }]);
    }
    ds
}

/// `exp(-decay * t) * sin(omega * t)` sampled at `t = 0, dt, 2 dt, ...`.
pub fn damped_sine(len: usize, dt: f64, omega: f64, decay: f64) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let t = i as f64 * dt;
            (-decay * t).exp() * (omega * t).sin()
        })
        .collect()
}

/// A sequence and its per-step targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSample {
    pub inputs: Vec<Vec<f64>>,
    pub target: Vec<f64>,
}

/// Sliding windows of length `window` over `series`, each labelled with the
/// value that follows it.
pub fn next_step_windows(series: &[f64], window: usize) -> Vec<SequenceSample> {
    if window == 0 || series.len() <= window {
        return Vec::new();
    }
    (0..series.len() - window)
        .map(|s| SequenceSample {
            inputs: series[s..s + window].iter().map(|v| vec![*v]).collect(),
            target: vec![series[s + window]],
        })
        .collect()
}
