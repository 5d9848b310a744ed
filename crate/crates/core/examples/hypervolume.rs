//! Exact and Monte-Carlo hypervolume of small fronts.
//!
//! cargo run --release --example hypervolume

use pareto_manifold::metrics::hypervolume_monte_carlo;
use pareto_manifold::{hypervolume, pareto_filter, Direction, FrontSample, HypervolumeSpec, VectorLoss};

fn front(points: &[&[f64]]) -> Vec<FrontSample> {
    points
        .iter()
        .map(|p| FrontSample::oracle(VectorLoss::new(p.to_vec()).unwrap()))
        .collect()
}

fn main() -> pareto_manifold::Result<()> {
    let two = front(&[&[0.2, 0.5], &[0.5, 0.2], &[0.6, 0.6]]);
    let spec = HypervolumeSpec::minimize(vec![1.0, 1.0]);
    println!("non-dominated: {}", pareto_filter(&two, Direction::Minimize).len());
    println!("2-D exact {}", hypervolume(&two, &spec)?);

    let three = front(&[&[0.1, 0.6, 0.5], &[0.4, 0.2, 0.7], &[0.7, 0.5, 0.1]]);
    let spec3 = HypervolumeSpec::minimize(vec![1.0; 3]);
    let mc = hypervolume_monte_carlo(&three, &spec3, 1_000_000, 0)?;
    println!("3-D exact {:.6}, Monte Carlo {:.6} +- {:.1e}", hypervolume(&three, &spec3)?, mc.value, mc.std_error);

    // Accuracies are maximized; the origin is the reference.
    let acc = front(&[&[0.95, 0.90], &[0.92, 0.94]]);
    println!("accuracy HV {:.4}", hypervolume(&acc, &HypervolumeSpec::maximize(vec![0.0, 0.0]))?);
    Ok(())
}
