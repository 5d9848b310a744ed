//! Single-model multi-task baselines: linear scalarization, two-task MGDA
//! and PCGrad.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::record::{TrajectoryEntry, TrajectoryRecord};
use super::TrainerConfig;
use crate::ensemble::ParameterVector;
use crate::error::{Error, Result};
use crate::objectives::{Objective, VectorGradient, VectorLoss};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselineMethod {
    #[serde(rename = "ls")]
    Ls,
    #[serde(rename = "mgda2")]
    Mgda2,
    #[serde(rename = "pcgrad")]
    PcGrad,
}

/// Gradient of the average task loss.
pub fn ls_combine(g: &VectorGradient) -> Vec<f64> {
    let tasks = g.tasks() as f64;
    let mut out = vec![0.0; g.params()];
    for row in g.rows() {
        out.iter_mut().zip(row).for_each(|(o, v)| *o += v / tasks);
    }
    out
}

/// Minimum-norm point `γ g₁ + (1-γ) g₂` of the segment between two
/// gradients; returns `(γ*, combined)`.
pub fn mgda2_combine(g1: &[f64], g2: &[f64]) -> Result<(f64, Vec<f64>)> {
    Error::check_dim(g1.len(), g2.len(), "MGDA gradient pair")?;
    let diff_sq: f64 = g1.iter().zip(g2).map(|(a, b)| (a - b) * (a - b)).sum();
    let gamma = if diff_sq == 0.0 {
        0.5
    } else {
        let num: f64 = g1.iter().zip(g2).map(|(a, b)| (b - a) * b).sum();
        (num / diff_sq).clamp(0.0, 1.0)
    };
    let combined = g1
        .iter()
        .zip(g2)
        .map(|(a, b)| gamma * a + (1.0 - gamma) * b)
        .collect();
    Ok((gamma, combined))
}

/// Removes from `g` its component along `onto` when the two conflict.
pub fn pcgrad_project(g: &[f64], onto: &[f64]) -> Vec<f64> {
    let dot: f64 = g.iter().zip(onto).map(|(a, b)| a * b).sum();
    let norm_sq: f64 = onto.iter().map(|v| v * v).sum();
    if dot >= 0.0 || norm_sq == 0.0 {
        return g.to_vec();
    }
    let k = dot / norm_sq;
    g.iter().zip(onto).map(|(a, b)| a - k * b).collect()
}

/// Projected task gradients (in task order), each projected against the
/// other tasks' original gradients in a random order.
pub fn pcgrad_combine<R: Rng + ?Sized>(g: &VectorGradient, rng: &mut R) -> Vec<Vec<f64>> {
    let tasks = g.tasks();
    (0..tasks)
        .map(|t| {
            let mut others: Vec<usize> = (0..tasks).filter(|&o| o != t).collect();
            others.shuffle(rng);
            others
                .into_iter()
                .fold(g.row(t).to_vec(), |acc, o| pcgrad_project(&acc, g.row(o)))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BaselineRun {
    pub theta: ParameterVector,
    pub trajectory: TrajectoryRecord,
    /// Loss at the final parameters.
    pub final_loss: VectorLoss,
    /// Change of the final step's losses (ℓ∞) relative to the previous step.
    pub final_drift: f64,
}

fn direction<R: Rng + ?Sized>(method: BaselineMethod, g: &VectorGradient, rng: &mut R) -> Result<Vec<f64>> {
    match method {
        BaselineMethod::Ls => Ok(ls_combine(g)),
        BaselineMethod::Mgda2 => {
            if g.tasks() != 2 {
                return Err(Error::Unsupported(format!(
                    "two-task MGDA needs exactly 2 tasks, got {}",
                    g.tasks()
                )));
            }
            mgda2_combine(g.row(0), g.row(1)).map(|(_, d)| d)
        }
        BaselineMethod::PcGrad => {
            let rows = pcgrad_combine(g, rng);
            let mut out = vec![0.0; g.params()];
            for row in rows {
                out.iter_mut().zip(row).for_each(|(o, v)| *o += v);
            }
            Ok(out)
        }
    }
}

/// Trains one model from `theta0` with the baseline's combined gradient.
/// The learning rate is used as is.
pub fn run_baseline(
    objective: &dyn Objective,
    theta0: ParameterVector,
    method: BaselineMethod,
    config: &TrainerConfig,
) -> Result<BaselineRun> {
    config.validate()?;
    Error::check_dim(objective.params(), theta0.len(), "baseline parameters")?;
    if method == BaselineMethod::Mgda2 && objective.tasks() != 2 {
        return Err(Error::Unsupported(format!(
            "two-task MGDA needs exactly 2 tasks, got {}",
            objective.tasks()
        )));
    }
    let mut theta = theta0.into_inner();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut optimizer = config.optimizer(theta.len());
    let mut trajectory = TrajectoryRecord::new();
    let mut previous: Option<VectorLoss> = None;
    let mut drift = 0.0;

    for iteration in 0..config.iterations {
        let (loss, grad) = objective.loss_and_grad(&theta)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                iteration,
                losses: loss.to_vec(),
            });
        }
        let total = loss.iter().sum::<f64>() / loss.tasks() as f64;
        if let Some(prev) = &previous {
            drift = prev.iter().zip(loss.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        }
        if config.logs(iteration) {
            trajectory.push(TrajectoryEntry {
                iteration,
                member_losses: vec![loss.clone()],
                total,
                reg: 0.0,
            })?;
        }
        let dir = direction(method, &grad, &mut rng)?;
        optimizer.step(&mut theta, &dir, config.learning_rate)?;
        previous = Some(loss);
    }

    let final_loss = objective.loss(&theta)?;
    if let Some(prev) = &previous {
        drift = prev.iter().zip(final_loss.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    }
    Ok(BaselineRun {
        theta: ParameterVector::new(theta)?,
        trajectory,
        final_loss,
        final_drift: drift,
    })
}
