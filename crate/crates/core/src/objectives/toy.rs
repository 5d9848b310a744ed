use serde::{Deserialize, Serialize};

use super::tape::{Real, Tape};
use super::{Objective, VectorGradient, VectorLoss};
use crate::error::{Error, Result};

/// Starting points used for the toy problem's members and baselines.
pub const TOY_INITS: [[f64; 2]; 5] = [[-8.5, 7.5], [0.0, 0.0], [9.0, 9.0], [-7.5, -0.5], [9.0, -1.0]];

const CLAMP: f64 = 5e-6;

/// Scale of the first task's loss relative to the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub scale_c: f64,
}

impl ToyConfig {
    pub fn new(scale_c: f64) -> Result<Self> {
        if !(scale_c > 0.0 && scale_c.is_finite()) {
            return Err(Error::invalid(format!("toy scale c must be positive, got {scale_c}")));
        }
        Ok(Self { scale_c })
    }
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self { scale_c: 1.0 }
    }
}

/// Building blocks of the unscaled toy losses.
#[derive(Debug, Clone, Copy)]
pub struct ToyTerms<R> {
    pub f1: R,
    pub f2: R,
    pub g1: R,
    pub g2: R,
    pub c1: R,
    pub c2: R,
}

impl<R: Real> ToyTerms<R> {
    /// `(c1 f1 + c2 g1, c1 f2 + c2 g2)`
    pub fn losses(&self) -> (R, R) {
        (
            self.c1 * self.f1 + self.c2 * self.g1,
            self.c1 * self.f2 + self.c2 * self.g2,
        )
    }
}

pub fn toy_terms<R: Real>(t1: R, t2: R) -> ToyTerms<R> {
    let clamp = t1.constant(CLAMP);
    let zero = t1.constant(0.0);
    let tanh_neg_t2 = (-t2).tanh();

    let f1 = ((-t1 - 7.0) * 0.5 - tanh_neg_t2).abs().max(clamp).ln() + 6.0;
    let f2 = ((-t1 + 3.0) * 0.5 - tanh_neg_t2 + 2.0).abs().max(clamp).ln() + 6.0;

    let shared = (-t2 - 8.0) * (-t2 - 8.0) * 0.1;
    let a = -t1 + 7.0;
    let b = -t1 - 7.0;
    let g1 = (a * a + shared) / 10.0 - 20.0;
    let g2 = (b * b + shared) / 10.0 - 20.0;

    // Constant first so that the tie at tanh(0) = 0 carries no gradient.
    let c1 = zero.max((t2 * 0.5).tanh());
    let c2 = zero.max((-t2 * 0.5).tanh());

    ToyTerms { f1, f2, g1, g2, c1, c2 }
}

fn check_theta(theta: &[f64]) -> Result<()> {
    Error::check_dim(2, theta.len(), "toy parameter vector")
}

/// `(c * l1, l2)` at `theta`.
pub fn toy_loss(theta: &[f64], cfg: &ToyConfig) -> Result<VectorLoss> {
    check_theta(theta)?;
    let (l1, l2) = toy_terms(theta[0], theta[1]).losses();
    Ok(VectorLoss::raw(vec![cfg.scale_c * l1, l2]))
}

/// Per-task gradients of [`toy_loss`] by reverse-mode differentiation.
pub fn toy_grad(theta: &[f64], cfg: &ToyConfig) -> Result<VectorGradient> {
    toy_loss_and_grad(theta, cfg).map(|(_, g)| g)
}

fn toy_loss_and_grad(theta: &[f64], cfg: &ToyConfig) -> Result<(VectorLoss, VectorGradient)> {
    check_theta(theta)?;
    let tape = Tape::new();
    let t1 = tape.var(theta[0]);
    let t2 = tape.var(theta[1]);
    let (l1, l2) = toy_terms(t1, t2).losses();
    let l1 = l1 * cfg.scale_c;

    let mut grad = VectorGradient::zeros(2, 2);
    for (task, out) in [l1, l2].into_iter().enumerate() {
        let adj = tape.backward(out);
        grad.row_mut(task).copy_from_slice(&[adj.wrt(t1), adj.wrt(t2)]);
    }
    Ok((VectorLoss::raw(vec![l1.value(), l2.value()]), grad))
}

/// The toy problem as an [`Objective`] over `theta ∈ R²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyObjective {
    pub config: ToyConfig,
}

impl ToyObjective {
    pub fn new(config: ToyConfig) -> Self {
        Self { config }
    }
}

impl Objective for ToyObjective {
    fn tasks(&self) -> usize {
        2
    }

    fn params(&self) -> usize {
        2
    }

    fn loss(&self, theta: &[f64]) -> Result<VectorLoss> {
        toy_loss(theta, &self.config)
    }

    fn loss_and_grad(&self, theta: &[f64]) -> Result<(VectorLoss, VectorGradient)> {
        toy_loss_and_grad(theta, &self.config)
    }
}
