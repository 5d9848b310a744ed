//! Ensemble training on the simplex, plus single-model baselines.
//!
//! Each PML step samples `window` interpolation weightings from a
//! Dirichlet distribution, evaluates the interpolated models, scalarizes
//! every vector loss with its own weighting, adds the ordering penalty and
//! pushes the gradient back through the interpolation onto all members.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::balancing::{l2, LossHistory, GRAD_NORM_FLOOR};
use crate::ensemble::{effective_loss_weighting, ParameterMatrix, TaskWeightMatrix};
use crate::error::{Error, Result};
use crate::objectives::{Objective, VectorGradient, VectorLoss};
use crate::simplex::{sample_dirichlet, DirichletParams, Weighting};

mod baselines;
mod graph;
mod optim;
mod record;

pub use baselines::{
    ls_combine, mgda2_combine, pcgrad_combine, pcgrad_project, run_baseline, BaselineMethod, BaselineRun,
};
pub use graph::{
    build_multiforward_graph, regularization, regularization_with_grad, total_loss, GraphMode,
    MultiForwardGraph, Regularization,
};
pub use optim::{adam_step, AdamState, OptimizerKind};
pub use record::{TrajectoryEntry, TrajectoryRecord};

use optim::Optimizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Balancing {
    #[default]
    None,
    Loss,
    Gradient,
}

fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_eps() -> f64 {
    1e-8
}
fn default_window() -> usize {
    1
}
fn default_balance_window() -> usize {
    10
}
fn default_dirichlet() -> f64 {
    1.0
}
fn default_log_every() -> u64 {
    100
}

/// Training hyperparameters shared by PML and the baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainerConfig {
    pub iterations: u64,
    pub learning_rate: f64,
    #[serde(default = "default_beta1")]
    pub adam_beta1: f64,
    #[serde(default = "default_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "default_eps")]
    pub adam_eps: f64,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    /// Weightings sampled per step (multi-forward window).
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub graph_mode: GraphMode,
    /// Symmetric Dirichlet concentration.
    #[serde(default = "default_dirichlet")]
    pub dirichlet: f64,
    #[serde(default)]
    pub balancing: Balancing,
    /// Running-mean window of loss balancing.
    #[serde(default = "default_balance_window")]
    pub balance_window: usize,
    #[serde(default)]
    pub lr_scale_by_members: bool,
    /// Replaced by the experiment seed when run from an experiment config.
    #[serde(default)]
    pub seed: u64,
    /// Logging stride; 0 disables the trajectory.
    #[serde(default = "default_log_every")]
    pub log_every: u64,
}

impl TrainerConfig {
    /// Adam at `learning_rate`, one weighting per step, no penalty.
    pub fn new(iterations: u64, learning_rate: f64, seed: u64) -> Self {
        Self {
            iterations,
            learning_rate,
            adam_beta1: default_beta1(),
            adam_beta2: default_beta2(),
            adam_eps: default_eps(),
            optimizer: OptimizerKind::Adam,
            window: default_window(),
            lambda: 0.0,
            graph_mode: GraphMode::Lex,
            dirichlet: default_dirichlet(),
            balancing: Balancing::None,
            balance_window: default_balance_window(),
            lr_scale_by_members: false,
            seed,
            log_every: default_log_every(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::invalid("window must be at least 1"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.dirichlet > 0.0 && self.dirichlet.is_finite()) {
            return Err(Error::invalid("Dirichlet concentration must be positive"));
        }
        if self.balance_window == 0 {
            return Err(Error::invalid("balance window must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn optimizer(&self, params: usize) -> Optimizer {
        Optimizer::new(self.optimizer, params, self.adam_beta1, self.adam_beta2, self.adam_eps)
    }

    fn logs(&self, iteration: u64) -> bool {
        self.log_every > 0 && iteration % self.log_every == 0
    }
}

/// Knobs of a single PML gradient evaluation.
#[derive(Debug, Clone, Default)]
pub struct StepOptions {
    pub lambda: f64,
    pub graph_mode: GraphMode,
    /// Divide task losses by these constants before scalarizing.
    pub loss_scales: Option<Vec<f64>>,
    /// Normalize each task's shared-parameter gradient to unit norm.
    pub balance_gradients: bool,
}

/// One evaluation of the PML objective and its gradient w.r.t. `Θ`.
#[derive(Debug, Clone)]
pub struct StepEval {
    pub total: f64,
    pub reg: f64,
    /// Raw (unbalanced) loss of every interpolated model.
    pub node_losses: Vec<VectorLoss>,
    /// Row-major `M x N`.
    pub grad: Vec<f64>,
}

/// Evaluates `Σ_i a_iᵀ L(a_iᵀΘ) + λ R` at fixed interpolation weightings
/// and backpropagates through the interpolation.
///
/// With `balance_gradients` the returned direction is no longer the
/// gradient of `total`: per task, the shared coordinates are divided by the
/// norm of that task's gradient summed over the interpolated models.
pub fn pml_step(
    objective: &dyn Objective,
    theta: &ParameterMatrix,
    task_weights: &TaskWeightMatrix,
    weightings: &[Weighting],
    options: &StepOptions,
) -> Result<StepEval> {
    let tasks = objective.tasks();
    Error::check_dim(tasks, task_weights.tasks(), "task weighting width")?;
    Error::check_dim(theta.members(), task_weights.members(), "task weighting rows")?;
    Error::check_dim(objective.params(), theta.params(), "objective parameter count")?;
    if weightings.is_empty() {
        return Err(Error::invalid("at least one weighting per step"));
    }
    let scales = match &options.loss_scales {
        Some(s) => {
            Error::check_dim(tasks, s.len(), "loss scales")?;
            s.clone()
        }
        None => vec![1.0; tasks],
    };

    let mut loss_weights = Vec::with_capacity(weightings.len());
    let mut raw = Vec::with_capacity(weightings.len());
    let mut grads: Vec<VectorGradient> = Vec::with_capacity(weightings.len());
    for a in weightings {
        loss_weights.push(effective_loss_weighting(a, task_weights)?);
        let point = theta.interpolate(a)?;
        let (l, g) = objective.loss_and_grad(&point)?;
        raw.push(l);
        grads.push(g);
    }
    let scaled: Vec<VectorLoss> = raw
        .iter()
        .map(|l| VectorLoss::raw(l.iter().zip(&scales).map(|(v, s)| v / s).collect()))
        .collect();

    // dL_total / dL̂_{i,t}
    let mut coeff: Vec<Vec<f64>> = loss_weights.iter().map(|w| w.to_vec()).collect();
    let mut reg = 0.0;
    if weightings.len() >= 2 {
        let graph = build_multiforward_graph(&loss_weights, options.graph_mode)?;
        let r = regularization_with_grad(&graph, &scaled)?;
        reg = r.value;
        if options.lambda > 0.0 {
            for (c, dr) in coeff.iter_mut().zip(&r.grad) {
                c.iter_mut().zip(dr).for_each(|(c, d)| *c += options.lambda * d);
            }
        }
    }
    let total = loss_weights
        .iter()
        .zip(&scaled)
        .map(|(w, l)| w.iter().zip(l.iter()).map(|(a, b)| a * b).sum::<f64>())
        .sum::<f64>()
        + options.lambda * reg;

    let shared = objective.shared_params();
    let mut task_norm = vec![1.0; tasks];
    if options.balance_gradients {
        for (t, norm) in task_norm.iter_mut().enumerate() {
            let mut agg = vec![0.0; shared.len()];
            for g in &grads {
                agg.iter_mut().zip(&g.row(t)[shared.clone()]).for_each(|(a, v)| *a += v);
            }
            let n = l2(&agg);
            if n >= GRAD_NORM_FLOOR {
                *norm = n;
            }
        }
    }

    let params = theta.params();
    let mut grad = vec![0.0; theta.members() * params];
    let mut node_dir = vec![0.0; params];
    for ((a, c), g) in weightings.iter().zip(&coeff).zip(&grads) {
        node_dir.iter_mut().for_each(|v| *v = 0.0);
        for t in 0..tasks {
            let k = c[t] / scales[t];
            if k == 0.0 {
                continue;
            }
            for (p, (d, v)) in node_dir.iter_mut().zip(g.row(t)).enumerate() {
                let norm = if shared.contains(&p) { task_norm[t] } else { 1.0 };
                *d += k * v / norm;
            }
        }
        for (m, alpha) in a.iter().enumerate() {
            if *alpha == 0.0 {
                continue;
            }
            grad[m * params..(m + 1) * params]
                .iter_mut()
                .zip(&node_dir)
                .for_each(|(gm, d)| *gm += alpha * d);
        }
    }

    Ok(StepEval {
        total,
        reg,
        node_losses: raw,
        grad,
    })
}

/// Result of [`run_pml`].
#[derive(Debug, Clone)]
pub struct PmlRun {
    pub theta: ParameterMatrix,
    pub trajectory: TrajectoryRecord,
}

/// Trains single-task members (`M = T`) on `objective`.
pub fn run_pml(objective: &dyn Objective, theta: ParameterMatrix, config: &TrainerConfig) -> Result<PmlRun> {
    let weights = TaskWeightMatrix::identity(objective.tasks());
    run_pml_weighted(objective, theta, &weights, config)
}

/// [`run_pml`] with explicit member task weightings.
pub fn run_pml_weighted(
    objective: &dyn Objective,
    mut theta: ParameterMatrix,
    task_weights: &TaskWeightMatrix,
    config: &TrainerConfig,
) -> Result<PmlRun> {
    config.validate()?;
    Error::check_dim(task_weights.members(), theta.members(), "ensemble members")?;
    let members = theta.members();
    let tasks = objective.tasks();
    let dirichlet = DirichletParams::symmetric(config.dirichlet, members)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut optimizer = config.optimizer(theta.as_flat().len());
    let mut history = LossHistory::new(tasks, config.balance_window)?;
    let lr = if config.lr_scale_by_members {
        config.learning_rate * members as f64
    } else {
        config.learning_rate
    };
    let mut options = StepOptions {
        lambda: config.lambda,
        graph_mode: config.graph_mode,
        loss_scales: None,
        balance_gradients: config.balancing == Balancing::Gradient,
    };
    let mut trajectory = TrajectoryRecord::new();

    for iteration in 0..config.iterations {
        let weightings: Vec<Weighting> = (0..config.window)
            .map(|_| sample_dirichlet(&dirichlet, &mut rng))
            .collect();

        if config.balancing == Balancing::Loss {
            // The history needs this step's losses before normalizing.
            let mut mean = vec![0.0; tasks];
            for a in &weightings {
                let l = objective.loss(&theta.interpolate(a)?)?;
                check_finite(iteration, &l)?;
                mean.iter_mut().zip(l.iter()).for_each(|(m, v)| *m += v / weightings.len() as f64);
            }
            history.record(&mean)?;
            options.loss_scales = Some(history.scales());
        }

        let step = pml_step(objective, &theta, task_weights, &weightings, &options)?;
        for l in &step.node_losses {
            check_finite(iteration, l)?;
        }
        if !step.total.is_finite() || step.grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss {
                iteration,
                losses: step.node_losses.iter().flat_map(|l| l.to_vec()).collect(),
            });
        }

        if config.logs(iteration) {
            let member_losses = theta
                .rows()
                .map(|row| objective.loss(row))
                .collect::<Result<Vec<_>>>()?;
            trajectory.push(TrajectoryEntry {
                iteration,
                member_losses,
                total: step.total,
                reg: step.reg,
            })?;
        }

        optimizer.step(theta.as_flat_mut(), &step.grad, lr)?;
    }
    Ok(PmlRun { theta, trajectory })
}

fn check_finite(iteration: u64, losses: &VectorLoss) -> Result<()> {
    if losses.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteLoss {
            iteration,
            losses: losses.to_vec(),
        })
    }
}
