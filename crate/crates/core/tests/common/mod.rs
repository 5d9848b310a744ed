//! Finite-difference oracles shared by the gradient tests and the
//! acceptance run.

#![allow(dead_code)]

use pareto_manifold::objectives::{make_synthetic_dataset, mlp_loss_and_grad, toy_grad, toy_loss, MlpObjective, MlpSpec, ToyConfig};
use pareto_manifold::trainer::{pml_step, StepOptions};
use pareto_manifold::{ParameterMatrix, TaskWeightMatrix, Weighting};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const H: f64 = 1e-6;

pub fn central<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[i] += H;
            down[i] -= H;
            (f(&up) - f(&down)) / (2.0 * H)
        })
        .collect()
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

/// Away from the gate switch at θ₂ = 0 and from the clamped log arguments.
pub fn smooth_toy_point(t: &[f64]) -> bool {
    let (t1, t2) = (t[0], t[1]);
    let a1 = 0.5 * (-t1 - 7.0) - (-t2).tanh();
    let a2 = 0.5 * (-t1 + 3.0) - (-t2).tanh() + 2.0;
    t2.abs() > 1e-3 && a1.abs() > 1e-3 && a2.abs() > 1e-3
}

/// Worst relative error of the toy gradient over `points` random smooth points.
pub fn toy_gradient_error(cfg: &ToyConfig, points: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < points {
        let theta = [rng.random_range(-12.0..12.0), rng.random_range(-12.0..12.0)];
        if !smooth_toy_point(&theta) {
            continue;
        }
        let g = toy_grad(&theta, cfg).unwrap();
        for t in 0..2 {
            let fd = central(|x| toy_loss(x, cfg).unwrap()[t], &theta);
            worst = worst.max(rel_err(g.row(t), &fd));
        }
        checked += 1;
    }
    worst
}

/// Worst relative error of the MLP task gradients over random parameters.
pub fn mlp_gradient_error(trials: usize, seed: u64) -> f64 {
    let spec = MlpSpec::new(2, vec![5, 3], 2).unwrap();
    let data = make_synthetic_dataset(0.8, 24, 0.2, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let theta = spec.init_params(&mut rng);
        let (_, g) = mlp_loss_and_grad(&theta, &spec, &data.batch()).unwrap();
        for t in 0..2 {
            let fd = central(|x| mlp_loss_and_grad(x, &spec, &data.batch()).unwrap().0[t], &theta);
            worst = worst.max(rel_err(g.row(t), &fd));
        }
    }
    worst
}

/// Worst relative error of the full PML step gradient w.r.t. Θ on an MLP
/// with at most 50 parameters per member, and whether the ordering
/// penalty was active in at least one penalized case.
pub fn step_gradient_error(seed: u64) -> (f64, bool) {
    let spec = MlpSpec::new(2, vec![4], 2).unwrap();
    assert!(spec.param_count() <= 50);
    let objective = MlpObjective::new(spec.clone(), make_synthetic_dataset(1.0, 32, 0.1, 8).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = ParameterMatrix::init_with(2, &mut rng, |r| spec.init_params(r)).unwrap();
    let weights = TaskWeightMatrix::identity(2);
    let weightings: Vec<Weighting> = [0.8, 0.55, 0.3]
        .iter()
        .map(|&a| Weighting::new(vec![a, 1.0 - a]).unwrap())
        .collect();

    let mut worst: f64 = 0.0;
    let mut penalized = false;
    for (lambda, scales) in [(0.0, None), (2.0, None), (5.0, Some(vec![0.7, 1.9]))] {
        let options = StepOptions {
            lambda,
            loss_scales: scales,
            ..StepOptions::default()
        };
        let step = pml_step(&objective, &theta, &weights, &weightings, &options).unwrap();
        let fd = central(
            |flat| {
                let rows = flat.chunks(theta.params()).map(<[f64]>::to_vec).collect();
                let perturbed = ParameterMatrix::from_rows(rows).unwrap();
                pml_step(&objective, &perturbed, &weights, &weightings, &options)
                    .unwrap()
                    .total
            },
            theta.as_flat(),
        );
        worst = worst.max(rel_err(&step.grad, &fd));
        penalized |= lambda > 0.0 && step.reg > 0.0;
    }
    (worst, penalized)
}
