//! Single-model baselines on the toy problem from each starting point.
//!
//! cargo run --release --example baselines

use pareto_manifold::objectives::{ToyObjective, TOY_INITS};
use pareto_manifold::{run_baseline, BaselineMethod, ParameterVector, TrainerConfig};

fn main() -> pareto_manifold::Result<()> {
    let objective = ToyObjective::default();
    let mut trainer = TrainerConfig::new(20_000, 2e-3, 0);
    trainer.log_every = 0;
    for method in [BaselineMethod::Ls, BaselineMethod::Mgda2, BaselineMethod::PcGrad] {
        for (i, init) in TOY_INITS.iter().enumerate() {
            let run = run_baseline(&objective, ParameterVector::new(init.to_vec())?, method, &trainer)?;
            println!(
                "{method:?} init {i}: theta {:.3?} loss {:.4?} drift {:.1e}",
                run.theta.as_slice(),
                run.final_loss.as_slice(),
                run.final_drift
            );
        }
    }
    Ok(())
}
