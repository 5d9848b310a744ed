//! Shared-bottom multilayer perceptron with per-task softmax heads.
//!
//! Parameter layout (row-major weights, `out x in`):
//! encoder layers `[W_1, b_1, …, W_L, b_L]`, then for every task head
//! `[V_t, c_t]`. The encoder occupies the leading `encoder_params()` entries.

use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dataset::{Batch, SyntheticDataset};
use super::{Objective, VectorGradient, VectorLoss};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub tasks: usize,
    pub output_dim: usize,
}

impl MlpSpec {
    pub fn new(input_dim: usize, hidden_dims: Vec<usize>, tasks: usize) -> Result<Self> {
        let spec = Self {
            input_dim,
            hidden_dims,
            tasks,
            output_dim: 2,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_dims.is_empty() {
            return Err(Error::invalid("MLP needs at least one hidden layer"));
        }
        if self.input_dim == 0 || self.tasks == 0 || self.output_dim < 2 || self.hidden_dims.contains(&0) {
            return Err(Error::invalid(format!("degenerate MLP shape {self:?}")));
        }
        Ok(())
    }

    fn layer_dims(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        std::iter::once(self.input_dim)
            .chain(self.hidden_dims.iter().copied())
            .zip(self.hidden_dims.iter().copied())
    }

    fn last_hidden(&self) -> usize {
        *self.hidden_dims.last().expect("validated non-empty")
    }

    pub fn encoder_params(&self) -> usize {
        self.layer_dims().map(|(i, o)| o * i + o).sum()
    }

    pub fn head_params(&self) -> usize {
        self.output_dim * self.last_hidden() + self.output_dim
    }

    pub fn param_count(&self) -> usize {
        self.encoder_params() + self.tasks * self.head_params()
    }

    /// Independent draws from `U(-1/sqrt(fan_in), 1/sqrt(fan_in))` per layer.
    pub fn init_params<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut theta = Vec::with_capacity(self.param_count());
        let mut layer = |fan_in: usize, count: usize, theta: &mut Vec<f64>| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            theta.extend((0..count).map(|_| rng.random_range(-bound..bound)));
        };
        for (i, o) in self.layer_dims() {
            layer(i, o * i + o, &mut theta);
        }
        for _ in 0..self.tasks {
            layer(self.last_hidden(), self.head_params(), &mut theta);
        }
        theta
    }
}

struct Layer {
    w: Range<usize>,
    b: Range<usize>,
    fan_in: usize,
    fan_out: usize,
}

fn layers(spec: &MlpSpec) -> (Vec<Layer>, Vec<Layer>) {
    let mut offset = 0;
    let mut take = |fan_in: usize, fan_out: usize| {
        let w = offset..offset + fan_in * fan_out;
        let b = w.end..w.end + fan_out;
        offset = b.end;
        Layer { w, b, fan_in, fan_out }
    };
    let encoder = spec.layer_dims().map(|(i, o)| take(i, o)).collect();
    let heads = (0..spec.tasks)
        .map(|_| take(spec.last_hidden(), spec.output_dim))
        .collect();
    (encoder, heads)
}

fn affine(theta: &[f64], layer: &Layer, x: &[f64], out: &mut Vec<f64>) {
    out.clear();
    let w = &theta[layer.w.clone()];
    let b = &theta[layer.b.clone()];
    for (o, row) in w.chunks_exact(layer.fan_in).enumerate() {
        out.push(b[o] + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>());
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    log_softmax(logits).into_iter().map(f64::exp).collect()
}

fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    logits.iter().map(|z| z - max - log_sum).collect()
}

fn check(theta: &[f64], spec: &MlpSpec, batch: &Batch<'_>) -> Result<()> {
    spec.validate()?;
    Error::check_dim(spec.param_count(), theta.len(), "MLP parameter vector")?;
    Error::check_dim(spec.input_dim, batch.input_dim, "MLP input width")?;
    Error::check_dim(spec.tasks, batch.labels.len(), "label sets")?;
    if batch.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    for labels in batch.labels {
        Error::check_dim(batch.len(), labels.len(), "labels per task")?;
        if labels.iter().any(|&y| y >= spec.output_dim) {
            return Err(Error::invalid("label out of range"));
        }
    }
    Ok(())
}

/// Per-sample activations: encoder pre-activations and post-activations,
/// reused across samples.
struct Trace {
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
}

impl Trace {
    fn new(encoder: &[Layer], input_dim: usize) -> Self {
        let mut post = vec![vec![0.0; input_dim]];
        post.extend(encoder.iter().map(|l| vec![0.0; l.fan_out]));
        Self {
            pre: encoder.iter().map(|l| vec![0.0; l.fan_out]).collect(),
            post,
        }
    }

    fn encode(&mut self, theta: &[f64], encoder: &[Layer], x: &[f64]) {
        self.post[0].copy_from_slice(x);
        for (l, layer) in encoder.iter().enumerate() {
            let (inputs, outputs) = self.post.split_at_mut(l + 1);
            affine(theta, layer, &inputs[l], &mut self.pre[l]);
            for (o, z) in outputs[0].iter_mut().zip(&self.pre[l]) {
                *o = z.max(0.0);
            }
        }
    }

    fn last(&self) -> &[f64] {
        self.post.last().expect("input layer present")
    }
}

/// Class probabilities per task for every sample: `out[t][i]`.
pub fn mlp_forward(theta: &[f64], spec: &MlpSpec, batch: &Batch<'_>) -> Result<Vec<Vec<Vec<f64>>>> {
    check(theta, spec, batch)?;
    let (encoder, heads) = layers(spec);
    let mut out = vec![Vec::with_capacity(batch.len()); spec.tasks];
    let mut logits = Vec::new();
    let mut trace = Trace::new(&encoder, spec.input_dim);
    for i in 0..batch.len() {
        trace.encode(theta, &encoder, batch.input(i));
        let h = trace.last();
        for (head, probs) in heads.iter().zip(out.iter_mut()) {
            affine(theta, head, h, &mut logits);
            probs.push(softmax(&logits));
        }
    }
    Ok(out)
}

/// Fraction of correctly classified samples per task.
pub fn mlp_accuracy(theta: &[f64], spec: &MlpSpec, batch: &Batch<'_>) -> Result<Vec<f64>> {
    let probs = mlp_forward(theta, spec, batch)?;
    Ok(probs
        .iter()
        .zip(batch.labels)
        .map(|(task_probs, labels)| {
            let hits = task_probs
                .iter()
                .zip(labels)
                .filter(|(p, &y)| {
                    let best = p
                        .iter()
                        .enumerate()
                        .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc })
                        .0;
                    best == y
                })
                .count();
            hits as f64 / labels.len() as f64
        })
        .collect())
}

/// Mean cross-entropy per task and its exact gradient, one row per task.
///
/// Head `t` only receives gradient from task `t`; the encoder receives
/// every task's gradient in that task's own row.
pub fn mlp_loss_and_grad(
    theta: &[f64],
    spec: &MlpSpec,
    batch: &Batch<'_>,
) -> Result<(VectorLoss, VectorGradient)> {
    check(theta, spec, batch)?;
    let (encoder, heads) = layers(spec);
    let n = batch.len() as f64;
    let mut losses = vec![0.0; spec.tasks];
    let mut grad = VectorGradient::zeros(spec.tasks, theta.len());
    let mut logits = Vec::new();
    let mut trace = Trace::new(&encoder, spec.input_dim);
    let widest = encoder.iter().map(|l| l.fan_in.max(l.fan_out)).max().unwrap_or(0);
    let mut upstream = Vec::with_capacity(widest);
    let mut next = Vec::with_capacity(widest);

    for i in 0..batch.len() {
        trace.encode(theta, &encoder, batch.input(i));
        let h = trace.last();
        for (t, head) in heads.iter().enumerate() {
            affine(theta, head, h, &mut logits);
            let log_probs = log_softmax(&logits);
            let y = batch.labels[t][i];
            losses[t] -= log_probs[y] / n;

            let g = grad.row_mut(t);
            // dL/dlogits = (p - onehot) / n
            let dlogits = log_probs
                .iter()
                .enumerate()
                .map(|(k, lp)| (lp.exp() - f64::from(u8::from(k == y))) / n);
            upstream.clear();
            upstream.resize(head.fan_in, 0.0);
            let w = &theta[head.w.clone()];
            for (o, d) in dlogits.enumerate() {
                g[head.b.start + o] += d;
                let row = head.w.start + o * head.fan_in;
                for j in 0..head.fan_in {
                    g[row + j] += d * h[j];
                    upstream[j] += d * w[o * head.fan_in + j];
                }
            }
            for (l, layer) in encoder.iter().enumerate().rev() {
                let input = &trace.post[l];
                let w = &theta[layer.w.clone()];
                next.clear();
                next.resize(layer.fan_in, 0.0);
                for (o, (u, z)) in upstream.iter().zip(&trace.pre[l]).enumerate() {
                    if *z <= 0.0 {
                        continue;
                    }
                    let d = *u;
                    g[layer.b.start + o] += d;
                    let row = layer.w.start + o * layer.fan_in;
                    for j in 0..layer.fan_in {
                        g[row + j] += d * input[j];
                        next[j] += d * w[o * layer.fan_in + j];
                    }
                }
                std::mem::swap(&mut upstream, &mut next);
            }
        }
    }
    Ok((VectorLoss::raw(losses), grad))
}

/// Full-batch cross-entropy objective over a dataset.
#[derive(Debug, Clone)]
pub struct MlpObjective {
    pub spec: MlpSpec,
    pub data: SyntheticDataset,
}

impl MlpObjective {
    pub fn new(spec: MlpSpec, data: SyntheticDataset) -> Result<Self> {
        spec.validate()?;
        Error::check_dim(2, spec.input_dim, "MLP input width")?;
        Error::check_dim(data.tasks(), spec.tasks, "MLP task heads")?;
        Ok(Self { spec, data })
    }

    pub fn accuracy(&self, theta: &[f64]) -> Result<Vec<f64>> {
        mlp_accuracy(theta, &self.spec, &self.data.batch())
    }
}

impl Objective for MlpObjective {
    fn tasks(&self) -> usize {
        self.spec.tasks
    }

    fn params(&self) -> usize {
        self.spec.param_count()
    }

    fn shared_params(&self) -> Range<usize> {
        0..self.spec.encoder_params()
    }

    fn loss_and_grad(&self, theta: &[f64]) -> Result<(VectorLoss, VectorGradient)> {
        mlp_loss_and_grad(theta, &self.spec, &self.data.batch())
    }
}
