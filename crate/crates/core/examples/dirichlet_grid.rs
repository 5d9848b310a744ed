//! Sampling weightings from a Dirichlet and enumerating a simplex grid.
//!
//! cargo run --example dirichlet_grid

use pareto_manifold::{make_grid, sample_dirichlet, DirichletParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pareto_manifold::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [0.2, 1.0, 5.0] {
        let params = DirichletParams::symmetric(p, 3)?;
        let draws: Vec<_> = (0..3).map(|_| sample_dirichlet(&params, &mut rng)).collect();
        println!("p = {p}: {:.3?}", draws.iter().map(|w| w.as_slice()).collect::<Vec<_>>());
    }

    let grid = make_grid(3, 5)?;
    println!("{} points with spacing 1/4 on the 2-simplex", grid.len());
    for a in grid.points().iter().take(5) {
        println!("  {:?}", a.as_slice());
    }
    Ok(())
}
