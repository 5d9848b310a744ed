//! Save an ensemble, load it back and evaluate a grid over its simplex.
//!
//! cargo run --release --example subspace_eval

use pareto_manifold::metrics::write_front_csv;
use pareto_manifold::objectives::ToyObjective;
use pareto_manifold::{evaluate_subspace, make_grid, ParameterMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("pml-subspace-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("theta.bin");

    let theta = ParameterMatrix::from_rows(vec![vec![-6.0, 2.0], vec![1.0, -3.0], vec![5.0, 4.0]])?;
    std::fs::write(&path, theta.to_bytes())?;
    let loaded = ParameterMatrix::load(&path)?;

    // Three members spanning a triangle of two-task toy models.
    let grid = make_grid(3, 11)?;
    let front = evaluate_subspace(&loaded, &grid, &ToyObjective::default())?;
    write_front_csv(&dir.join("front.csv"), &front, loaded.members())?;
    println!("{} points written to {}", front.len(), dir.display());
    Ok(())
}
