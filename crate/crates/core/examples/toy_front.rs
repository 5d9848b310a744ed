//! Train a two-member ensemble on the toy problem and compare the segment
//! between the members with the brute-force Pareto front.
//!
//! cargo run --release --example toy_front

use pareto_manifold::metrics::toy_reference;
use pareto_manifold::objectives::{ToyConfig, ToyObjective, TOY_INITS};
use pareto_manifold::{
    evaluate_subspace, hypervolume, make_grid, oracle_front_toy, run_pml, HypervolumeSpec, ParameterMatrix,
    TrainerConfig,
};

fn main() -> pareto_manifold::Result<()> {
    let cfg = ToyConfig::default();
    let objective = ToyObjective::new(cfg);
    let theta = ParameterMatrix::from_rows(vec![TOY_INITS[0].to_vec(), TOY_INITS[2].to_vec()])?;

    let run = run_pml(&objective, theta, &TrainerConfig::new(50_000, 2e-3, 0))?;
    println!("members: {:.3?} and {:.3?}", run.theta.row(0), run.theta.row(1));

    let spec = HypervolumeSpec::minimize(toy_reference(&cfg)?);
    let front = evaluate_subspace(&run.theta, &make_grid(2, 101)?, &objective)?;
    let oracle = oracle_front_toy(&cfg, 1201)?;
    let (hv, best) = (hypervolume(&front, &spec)?, hypervolume(&oracle, &spec)?);
    println!("segment HV {hv:.4}, oracle HV {best:.4}, ratio {:.4}", hv / best);
    Ok(())
}
