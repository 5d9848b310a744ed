//! Several weightings per step and the ordering penalty: the losses along
//! the segment should rise for one task and fall for the other.
//!
//! cargo run --release --example multiforward

use pareto_manifold::metrics::spearman;
use pareto_manifold::trainer::{build_multiforward_graph, regularization, GraphMode};
use pareto_manifold::{sample_dirichlet, DirichletParams, VectorLoss, Weighting};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pareto_manifold::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let nodes: Vec<Weighting> = (0..4)
        .map(|_| sample_dirichlet(&DirichletParams::symmetric(1.0, 2).unwrap(), &mut rng))
        .collect();
    let graph = build_multiforward_graph(&nodes, GraphMode::Lex)?;
    for t in 0..2 {
        println!("task {t} edges: {:?}", graph.edges(t));
    }

    // Losses that follow the weightings exactly cost nothing.
    let ordered: Vec<VectorLoss> = nodes
        .iter()
        .map(|a| VectorLoss::new(a.as_slice().iter().map(|x| 1.0 - x).collect()))
        .collect::<Result<_, _>>()?;
    println!("ordered losses: R = {}", regularization(&graph, &ordered)?);

    // Flip the first task's losses and the penalty wakes up.
    let flipped: Vec<VectorLoss> = nodes
        .iter()
        .map(|a| VectorLoss::new(vec![a.as_slice()[0], 1.0 - a.as_slice()[1]]))
        .collect::<Result<_, _>>()?;
    println!("flipped task 0: R = {:.4}", regularization(&graph, &flipped)?);

    let alpha: Vec<f64> = nodes.iter().map(|a| a.as_slice()[0]).collect();
    let loss: Vec<f64> = ordered.iter().map(|l| l.as_slice()[0]).collect();
    println!("rank correlation of alpha_1 and L_1: {:.3}", spearman(&alpha, &loss)?);
    Ok(())
}
