//! Fully-connected ReLU network trained by full-batch gradient descent.
//!
//! The trainer is deliberately plain: fixed epoch count, fixed learning
//! rate, no early stopping. Given the same data, spec and init stream it
//! reproduces the same parameter vector bit for bit, which the permutation
//! engine relies on.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::models::RegressorSpec;

/// Feed-forward network with flat parameter storage. For each layer the
/// weight block (`out x in`, row-major) is followed by the bias block.
/// Hidden activations are ReLU, the single output is linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    dims: Vec<usize>,
    params: Vec<f64>,
}

fn param_count(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

struct Scratch {
    acts: Vec<Vec<f64>>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl Scratch {
    fn new(dims: &[usize], n: usize) -> Self {
        let acts = dims[1..].iter().map(|&w| vec![0.0; n * w]).collect();
        let max_width = dims.iter().copied().max().unwrap_or(1);
        Self {
            acts,
            delta: vec![0.0; n * max_width],
            delta_prev: vec![0.0; n * max_width],
        }
    }
}

impl Network {
    /// Glorot-uniform weights, zero biases. `dims` runs from the input
    /// dimension through the hidden widths to the output dimension.
    pub fn init(dims: Vec<usize>, rng: &mut ChaCha8Rng) -> Self {
        assert!(dims.len() >= 2, "need an input and an output layer");
        let mut params = Vec::with_capacity(param_count(&dims));
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push((rng.random::<f64>() * 2.0 - 1.0) * limit);
            }
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Self { dims, params }
    }

    /// Build from an explicit parameter vector.
    pub fn with_params(dims: Vec<usize>, params: Vec<f64>) -> Self {
        assert_eq!(params.len(), param_count(&dims));
        Self { dims, params }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn forward_into(&self, x: &[f64], n: usize, acts: &mut [Vec<f64>]) {
        let layers = self.dims.len() - 1;
        let mut offset = 0;
        for l in 0..layers {
            let (inw, outw) = (self.dims[l], self.dims[l + 1]);
            let weights = &self.params[offset..offset + outw * inw];
            let biases = &self.params[offset + outw * inw..offset + outw * inw + outw];
            offset += outw * inw + outw;
            let last = l + 1 == layers;
            let (prev, cur): (&[f64], &mut Vec<f64>) = if l == 0 {
                (x, &mut acts[0])
            } else {
                let (left, right) = acts.split_at_mut(l);
                (&left[l - 1], &mut right[0])
            };
            for i in 0..n {
                let input = &prev[i * inw..(i + 1) * inw];
                let out_row = &mut cur[i * outw..(i + 1) * outw];
                for o in 0..outw {
                    let row = &weights[o * inw..(o + 1) * inw];
                    let mut sum = biases[o];
                    for k in 0..inw {
                        sum += row[k] * input[k];
                    }
                    out_row[o] = if last { sum } else { sum.max(0.0) };
                }
            }
        }
    }

    /// Predictions for `n` row-major input rows.
    pub fn forward(&self, x: &[f64], n: usize) -> Vec<f64> {
        let mut acts: Vec<Vec<f64>> = self.dims[1..].iter().map(|&w| vec![0.0; n * w]).collect();
        self.forward_into(x, n, &mut acts);
        acts.pop().unwrap()
    }

    /// Mean squared error of the network on `(x, y)`.
    pub fn loss(&self, x: &[f64], y: &[f64], n: usize) -> f64 {
        let preds = self.forward(x, n);
        preds
            .iter()
            .zip(y)
            .map(|(p, t)| (p - t).powi(2))
            .sum::<f64>()
            / n as f64
    }

    /// Loss and its analytic gradient with respect to every parameter.
    pub fn gradient(&self, x: &[f64], y: &[f64], n: usize) -> (f64, Vec<f64>) {
        let mut scratch = Scratch::new(&self.dims, n);
        let mut grad = vec![0.0; self.params.len()];
        let loss = self.grad_into(x, y, n, &mut scratch, &mut grad);
        (loss, grad)
    }

    fn grad_into(
        &self,
        x: &[f64],
        y: &[f64],
        n: usize,
        scratch: &mut Scratch,
        grad: &mut [f64],
    ) -> f64 {
        let layers = self.dims.len() - 1;
        self.forward_into(x, n, &mut scratch.acts);
        let preds = &scratch.acts[layers - 1];
        let loss = preds
            .iter()
            .zip(y)
            .map(|(p, t)| (p - t).powi(2))
            .sum::<f64>()
            / n as f64;

        grad.fill(0.0);
        let scale = 2.0 / n as f64;
        for i in 0..n {
            scratch.delta[i] = scale * (preds[i] - y[i]);
        }

        // Parameter offsets of each layer.
        let mut offsets = Vec::with_capacity(layers);
        let mut acc = 0;
        for w in self.dims.windows(2) {
            offsets.push(acc);
            acc += w[0] * w[1] + w[1];
        }

        for l in (0..layers).rev() {
            let (inw, outw) = (self.dims[l], self.dims[l + 1]);
            let offset = offsets[l];
            let (dw, db) = {
                let block = &mut grad[offset..offset + outw * inw + outw];
                block.split_at_mut(outw * inw)
            };
            for i in 0..n {
                let a_prev: &[f64] = if l == 0 {
                    &x[i * inw..(i + 1) * inw]
                } else {
                    &scratch.acts[l - 1][i * inw..(i + 1) * inw]
                };
                for o in 0..outw {
                    let d = scratch.delta[i * outw + o];
                    if d != 0.0 {
                        let row = &mut dw[o * inw..(o + 1) * inw];
                        for k in 0..inw {
                            row[k] += d * a_prev[k];
                        }
                    }
                    db[o] += d;
                }
            }
            if l > 0 {
                let weights = &self.params[offset..offset + outw * inw];
                scratch.delta_prev[..n * inw].fill(0.0);
                for i in 0..n {
                    let drow = &mut scratch.delta_prev[i * inw..(i + 1) * inw];
                    for o in 0..outw {
                        let d = scratch.delta[i * outw + o];
                        if d != 0.0 {
                            let wrow = &weights[o * inw..(o + 1) * inw];
                            for k in 0..inw {
                                drow[k] += d * wrow[k];
                            }
                        }
                    }
                    // ReLU mask: activation zero means the unit was off.
                    let a_prev = &scratch.acts[l - 1][i * inw..(i + 1) * inw];
                    for k in 0..inw {
                        if a_prev[k] <= 0.0 {
                            drow[k] = 0.0;
                        }
                    }
                }
                scratch.delta[..n * inw].copy_from_slice(&scratch.delta_prev[..n * inw]);
            }
        }
        loss
    }

    /// Full-batch gradient descent for exactly `epochs` steps.
    pub fn train(&mut self, x: &[f64], y: &[f64], n: usize, epochs: usize, lr: f64) -> Result<()> {
        let mut scratch = Scratch::new(&self.dims, n);
        let mut grad = vec![0.0; self.params.len()];
        for epoch in 0..epochs {
            let loss = self.grad_into(x, y, n, &mut scratch, &mut grad);
            if !loss.is_finite() {
                return Err(Error::DivergedTraining { epoch });
            }
            for (p, g) in self.params.iter_mut().zip(&grad) {
                *p -= lr * g;
            }
        }
        if !self.loss(x, y, n).is_finite() {
            return Err(Error::DivergedTraining { epoch: epochs });
        }
        Ok(())
    }
}

/// Trained MLP regressor. Inputs and responses are standardized internally
/// for training; predictions are mapped back to the original scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    network: Network,
    x_mean: Vec<f64>,
    x_scale: Vec<f64>,
    y_mean: f64,
    y_scale: f64,
}

fn column_stats(data: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let n = data.n() as f64;
    let d = data.dim();
    let mut mean = vec![0.0; d];
    let mut scale = vec![0.0; d];
    for j in 0..d {
        let col = data.predictor_column(j);
        let m = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
        mean[j] = m;
        let sd = var.sqrt();
        scale[j] = if sd > 1e-12 { sd } else { 1.0 };
    }
    (mean, scale)
}

pub fn fit(data: &Dataset, spec: &RegressorSpec, init: &mut ChaCha8Rng) -> Result<MlpModel> {
    let n = data.n();
    let d = data.dim();
    let (x_mean, x_scale) = column_stats(data);
    let y_mean = data.responses().iter().sum::<f64>() / n as f64;
    let y_var = data
        .responses()
        .iter()
        .map(|y| (y - y_mean).powi(2))
        .sum::<f64>()
        / n as f64;
    let y_sd = y_var.sqrt();
    let y_scale = if y_sd > 1e-12 { y_sd } else { 1.0 };

    let mut x_std = Vec::with_capacity(n * d);
    for i in 0..n {
        for (j, v) in data.predictors().row(i).iter().enumerate() {
            x_std.push((v - x_mean[j]) / x_scale[j]);
        }
    }
    let y_std: Vec<f64> = data
        .responses()
        .iter()
        .map(|y| (y - y_mean) / y_scale)
        .collect();

    let mut dims = Vec::with_capacity(spec.mlp_layers.len() + 2);
    dims.push(d);
    dims.extend_from_slice(&spec.mlp_layers);
    dims.push(1);

    let mut network = Network::init(dims, init);
    network.train(&x_std, &y_std, n, spec.mlp_epochs, spec.mlp_learning_rate)?;

    Ok(MlpModel {
        network,
        x_mean,
        x_scale,
        y_mean,
        y_scale,
    })
}

impl MlpModel {
    pub fn predict(&self, predictors: &Matrix) -> Result<Vec<f64>> {
        if predictors.cols() != self.x_mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x_mean.len(),
                got: predictors.cols(),
            });
        }
        let n = predictors.rows();
        let d = predictors.cols();
        let mut x_std = Vec::with_capacity(n * d);
        for i in 0..n {
            for (j, v) in predictors.row(i).iter().enumerate() {
                x_std.push((v - self.x_mean[j]) / self.x_scale[j]);
            }
        }
        let out = self.network.forward(&x_std, n);
        Ok(out
            .into_iter()
            .map(|p| p * self.y_scale + self.y_mean)
            .collect())
    }

    pub fn parameters(&self) -> &[f64] {
        self.network.params()
    }

    pub fn network(&self) -> &Network {
        &self.network
    }
}
