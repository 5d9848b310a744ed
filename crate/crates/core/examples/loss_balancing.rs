//! With the first toy loss scaled down by 10, plain PML collapses towards
//! the dominant task. Loss and gradient balancing undo the imbalance.
//!
//! cargo run --release --example loss_balancing

use pareto_manifold::metrics::toy_reference;
use pareto_manifold::objectives::{ToyConfig, ToyObjective, TOY_INITS};
use pareto_manifold::trainer::Balancing;
use pareto_manifold::{
    evaluate_subspace, hypervolume, make_grid, oracle_front_toy, run_pml, HypervolumeSpec, ParameterMatrix,
    TrainerConfig,
};

fn main() -> pareto_manifold::Result<()> {
    let cfg = ToyConfig::new(0.1)?;
    let objective = ToyObjective::new(cfg);
    let spec = HypervolumeSpec::minimize(toy_reference(&cfg)?);
    let oracle_hv = hypervolume(&oracle_front_toy(&cfg, 600)?, &spec)?;

    for balancing in [Balancing::None, Balancing::Loss, Balancing::Gradient] {
        let theta = ParameterMatrix::from_rows(vec![TOY_INITS[3].to_vec(), TOY_INITS[4].to_vec()])?;
        let mut trainer = TrainerConfig::new(20_000, 2e-3, 0);
        trainer.balancing = balancing;
        trainer.log_every = 0;
        let run = run_pml(&objective, theta, &trainer)?;
        let front = evaluate_subspace(&run.theta, &make_grid(2, 101)?, &objective)?;
        println!("{balancing:?}: HV ratio {:.4}", hypervolume(&front, &spec)? / oracle_hv);
    }
    Ok(())
}
