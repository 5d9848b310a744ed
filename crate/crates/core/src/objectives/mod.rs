//! Differentiable vector objectives.
//!
//! [`ToyObjective`] is a closed-form two-task problem differentiated with
//! the scalar [`tape`]; [`MlpObjective`] is a shared-bottom network on a
//! synthetic two-task dataset with hand-written backpropagation.

use std::ops::{Deref, Range};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod dataset;
mod mlp;
pub mod tape;
mod toy;

pub use dataset::{make_synthetic_dataset, Batch, SyntheticDataset};
pub use mlp::{mlp_accuracy, mlp_forward, mlp_loss_and_grad, MlpObjective, MlpSpec};
pub use toy::{toy_grad, toy_loss, toy_terms, ToyConfig, ToyObjective, ToyTerms, TOY_INITS};

/// Per-task losses `[L_1, …, L_T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorLoss(Vec<f64>);

impl VectorLoss {
    pub fn new(losses: Vec<f64>) -> Result<Self> {
        let out = Self(losses);
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::invalid(format!("non-finite losses {:?}", out.0)))
        }
    }

    /// Wraps raw values without the finiteness check; callers that train
    /// on these values check [`VectorLoss::is_finite`] themselves.
    pub(crate) fn raw(losses: Vec<f64>) -> Self {
        Self(losses)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn tasks(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for VectorLoss {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Per-task gradients, one row of length `N` per task.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorGradient {
    params: usize,
    data: Vec<f64>,
}

impl VectorGradient {
    pub fn zeros(tasks: usize, params: usize) -> Self {
        Self {
            params,
            data: vec![0.0; tasks * params],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let params = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * params);
        for row in &rows {
            Error::check_dim(params, row.len(), "gradient row")?;
            data.extend_from_slice(row);
        }
        Ok(Self { params, data })
    }

    pub fn tasks(&self) -> usize {
        if self.params == 0 {
            0
        } else {
            self.data.len() / self.params
        }
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn row(&self, task: usize) -> &[f64] {
        &self.data[task * self.params..(task + 1) * self.params]
    }

    pub fn row_mut(&mut self, task: usize) -> &mut [f64] {
        &mut self.data[task * self.params..(task + 1) * self.params]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.params.max(1))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// A vector-valued loss over a flat parameter vector.
pub trait Objective: Sync {
    fn tasks(&self) -> usize;

    fn params(&self) -> usize;

    /// Parameters shared by every task; gradient balancing only touches
    /// this range.
    fn shared_params(&self) -> Range<usize> {
        0..self.params()
    }

    fn loss(&self, theta: &[f64]) -> Result<VectorLoss> {
        self.loss_and_grad(theta).map(|(l, _)| l)
    }

    fn loss_and_grad(&self, theta: &[f64]) -> Result<(VectorLoss, VectorGradient)>;
}
