//! Two-member MLP ensemble on the synthetic two-task dataset. The ordering
//! penalty makes the training losses move in opposite directions along the
//! segment. Test accuracy barely changes because the small network has
//! little real conflict between the tasks.
//!
//! cargo run --release --example mlp_tradeoff

use pareto_manifold::experiments::{DatasetConfig, EvalSplit};
use pareto_manifold::objectives::MlpSpec;
use pareto_manifold::{make_grid, run_pml, Objective, ParameterMatrix, TrainerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pareto_manifold::Result<()> {
    let dataset = DatasetConfig {
        conflict_angle: std::f64::consts::FRAC_PI_3,
        samples: 2000,
        noise_std: 0.1,
        eval: EvalSplit::Test,
    };
    let (train, test) = dataset.objectives(&[16], 0)?;
    let spec = MlpSpec::new(2, vec![16], 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let theta = ParameterMatrix::init_with(2, &mut rng, |r| spec.init_params(r))?;

    let mut trainer = TrainerConfig::new(3000, 1e-3, 0);
    trainer.window = 3;
    trainer.lambda = 5.0;
    trainer.lr_scale_by_members = true;
    trainer.log_every = 0;
    let run = run_pml(&train, theta, &trainer)?;

    for a in make_grid(2, 11)?.points() {
        let model = run.theta.interpolate(a)?;
        let loss = train.loss(model.as_slice())?;
        let acc = test.accuracy(model.as_slice())?;
        println!(
            "alpha_1 {:.1}: train loss {:.5} / {:.5}, test accuracy {:.4} / {:.4}",
            a.as_slice()[0],
            loss.as_slice()[0],
            loss.as_slice()[1],
            acc[0],
            acc[1]
        );
    }
    Ok(())
}
