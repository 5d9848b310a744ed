//! Multi-forward ordering graphs and the log-mean-exp ordering penalty.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::VectorLoss;
use crate::simplex::Weighting;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    /// Every pair `(i, j)` with `α_{i,t} < α_{j,t}`.
    Full,
    /// A chain through the nodes sorted by the task's coordinate.
    #[default]
    Lex,
}

/// Per-task directed graphs over the weightings sampled in one step.
///
/// An edge `(i, j)` in task `t`'s list means node `j` puts more weight on
/// task `t` than node `i`, so it should reach a lower task-`t` loss.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiForwardGraph {
    nodes: Vec<Weighting>,
    edges: Vec<Vec<(usize, usize)>>,
}

impl MultiForwardGraph {
    pub fn nodes(&self) -> &[Weighting] {
        &self.nodes
    }

    pub fn tasks(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self, task: usize) -> &[(usize, usize)] {
        &self.edges[task]
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub fn build_multiforward_graph(weightings: &[Weighting], mode: GraphMode) -> Result<MultiForwardGraph> {
    if weightings.len() < 2 {
        return Err(Error::invalid(format!(
            "multi-forward graph needs at least 2 nodes, got {}",
            weightings.len()
        )));
    }
    let tasks = weightings[0].dim();
    for w in weightings {
        Error::check_dim(tasks, w.dim(), "graph node weighting")?;
    }
    let edges = (0..tasks)
        .map(|t| match mode {
            GraphMode::Full => {
                let mut e = Vec::new();
                for (i, wi) in weightings.iter().enumerate() {
                    for (j, wj) in weightings.iter().enumerate() {
                        if wi[t] < wj[t] {
                            e.push((i, j));
                        }
                    }
                }
                e
            }
            GraphMode::Lex => {
                let mut order: Vec<usize> = (0..weightings.len()).collect();
                order.sort_by(|&i, &j| {
                    weightings[i][t]
                        .total_cmp(&weightings[j][t])
                        .then_with(|| lexicographic(&weightings[i], &weightings[j]))
                });
                order.windows(2).map(|p| (p[0], p[1])).collect()
            }
        })
        .collect();
    Ok(MultiForwardGraph {
        nodes: weightings.to_vec(),
        edges,
    })
}

/// Value of the ordering penalty and its gradient with respect to every
/// node loss (`grad[node][task]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Regularization {
    pub value: f64,
    pub grad: Vec<Vec<f64>>,
}

fn check_losses(graph: &MultiForwardGraph, losses: &[VectorLoss]) -> Result<()> {
    Error::check_dim(graph.nodes.len(), losses.len(), "losses per graph node")?;
    for l in losses {
        Error::check_dim(graph.tasks(), l.tasks(), "tasks per node loss")?;
    }
    Ok(())
}

/// `Σ_t log( mean_{(i,j) ∈ E_t} exp([L_t(a_j) - L_t(a_i)]₊) )`.
///
/// Tasks without edges contribute zero. The hinge has subgradient 0 at 0.
pub fn regularization_with_grad(graph: &MultiForwardGraph, losses: &[VectorLoss]) -> Result<Regularization> {
    check_losses(graph, losses)?;
    let mut value = 0.0;
    let mut grad = vec![vec![0.0; graph.tasks()]; losses.len()];
    for (t, edges) in graph.edges.iter().enumerate() {
        if edges.is_empty() {
            continue;
        }
        let gaps: Vec<f64> = edges
            .iter()
            .map(|&(i, j)| (losses[j][t] - losses[i][t]).max(0.0))
            .collect();
        let top = gaps.iter().copied().fold(0.0, f64::max);
        let weights: Vec<f64> = gaps.iter().map(|g| (g - top).exp()).collect();
        let sum: f64 = weights.iter().sum();
        value += top + (sum / edges.len() as f64).ln();
        for (&(i, j), (gap, w)) in edges.iter().zip(gaps.iter().zip(&weights)) {
            if *gap > 0.0 {
                let d = w / sum;
                grad[j][t] += d;
                grad[i][t] -= d;
            }
        }
    }
    Ok(Regularization { value, grad })
}

pub fn regularization(graph: &MultiForwardGraph, losses: &[VectorLoss]) -> Result<f64> {
    regularization_with_grad(graph, losses).map(|r| r.value)
}

/// `Σ_i a_iᵀ L(a_i) + λ·R`; the penalty term is skipped without a graph.
pub fn total_loss(
    weightings: &[Weighting],
    losses: &[VectorLoss],
    lambda: f64,
    graph: Option<&MultiForwardGraph>,
) -> Result<f64> {
    Error::check_dim(weightings.len(), losses.len(), "losses per weighting")?;
    let mut total = 0.0;
    for (w, l) in weightings.iter().zip(losses) {
        Error::check_dim(w.dim(), l.tasks(), "loss weighting")?;
        total += w.iter().zip(l.iter()).map(|(a, b)| a * b).sum::<f64>();
    }
    if let Some(graph) = graph {
        total += lambda * regularization(graph, losses)?;
    }
    Ok(total)
}
