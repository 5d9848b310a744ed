//! Loss balancing by a windowed running mean and gradient balancing by
//! unit ℓ₂ normalization.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::objectives::{VectorGradient, VectorLoss};

/// Guard added to the running-mean denominator.
pub const LOSS_EPS: f64 = 1e-12;

/// Rows with a smaller ℓ₂ norm are left untouched by [`gradient_balance`].
pub const GRAD_NORM_FLOOR: f64 = 1e-12;

/// The last `window` loss values of every task.
#[derive(Debug, Clone, PartialEq)]
pub struct LossHistory {
    window: usize,
    steps: u64,
    buffers: Vec<VecDeque<f64>>,
}

impl LossHistory {
    pub fn new(tasks: usize, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::invalid("balancing window must be positive"));
        }
        if tasks == 0 {
            return Err(Error::invalid("loss history needs at least one task"));
        }
        Ok(Self {
            window,
            steps: 0,
            buffers: vec![VecDeque::with_capacity(window); tasks],
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of recorded steps (τ₀).
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn tasks(&self) -> usize {
        self.buffers.len()
    }

    /// Appends one value per task, evicting the oldest beyond the window.
    pub fn record(&mut self, losses: &[f64]) -> Result<()> {
        Error::check_dim(self.tasks(), losses.len(), "loss history update")?;
        if losses.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("loss history only accepts finite values"));
        }
        for (buf, &v) in self.buffers.iter_mut().zip(losses) {
            if buf.len() == self.window {
                buf.pop_front();
            }
            buf.push_back(v);
        }
        self.steps += 1;
        Ok(())
    }

    /// Mean of the last `min(τ₀, window)` values per task.
    pub fn means(&self) -> Vec<f64> {
        self.buffers
            .iter()
            .map(|b| {
                if b.is_empty() {
                    0.0
                } else {
                    b.iter().sum::<f64>() / b.len() as f64
                }
            })
            .collect()
    }

    /// Per-task divisor `|mean| + ε` used by [`loss_balance`].
    pub fn scales(&self) -> Vec<f64> {
        self.means().into_iter().map(|m| m.abs() + LOSS_EPS).collect()
    }
}

/// Divides each task loss by its running mean.
///
/// `hist` must already contain the current step's losses. The magnitude
/// of the mean is used so that negative loss streams keep their direction.
pub fn loss_balance(raw: &VectorLoss, hist: &LossHistory) -> Result<VectorLoss> {
    Error::check_dim(hist.tasks(), raw.tasks(), "loss balancing")?;
    Ok(VectorLoss::raw(
        raw.iter().zip(hist.scales()).map(|(l, s)| l / s).collect(),
    ))
}

/// Rescales every row to unit ℓ₂ norm; near-zero rows pass through.
pub fn gradient_balance(g: &VectorGradient) -> VectorGradient {
    let mut out = g.clone();
    for t in 0..out.tasks() {
        let row = out.row_mut(t);
        let norm = l2(row);
        if norm >= GRAD_NORM_FLOOR {
            row.iter_mut().for_each(|v| *v /= norm);
        }
    }
    out
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
