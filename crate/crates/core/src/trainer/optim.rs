use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    #[default]
    Adam,
    Sgd,
}

/// First and second moment estimates of bias-corrected Adam.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl AdamState {
    pub fn new(params: usize, beta1: f64, beta2: f64, eps: f64) -> Self {
        Self {
            beta1,
            beta2,
            eps,
            m: vec![0.0; params],
            v: vec![0.0; params],
            t: 0,
        }
    }

    pub fn steps(&self) -> i32 {
        self.t
    }
}

/// One Adam update of `params` in place.
pub fn adam_step(state: &mut AdamState, params: &mut [f64], grad: &[f64], lr: f64) -> Result<()> {
    Error::check_dim(state.m.len(), params.len(), "Adam parameters")?;
    Error::check_dim(state.m.len(), grad.len(), "Adam gradient")?;
    state.t += 1;
    let (b1, b2) = (state.beta1, state.beta2);
    let c1 = 1.0 - b1.powi(state.t);
    let c2 = 1.0 - b2.powi(state.t);
    for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut state.m).zip(&mut state.v) {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}

/// Either optimizer behind one update call.
#[derive(Debug, Clone)]
pub(crate) enum Optimizer {
    Adam(AdamState),
    Sgd,
}

impl Optimizer {
    pub(crate) fn new(kind: OptimizerKind, params: usize, beta1: f64, beta2: f64, eps: f64) -> Self {
        match kind {
            OptimizerKind::Adam => Optimizer::Adam(AdamState::new(params, beta1, beta2, eps)),
            OptimizerKind::Sgd => Optimizer::Sgd,
        }
    }

    pub(crate) fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) -> Result<()> {
        match self {
            Optimizer::Adam(state) => adam_step(state, params, grad, lr),
            Optimizer::Sgd => {
                Error::check_dim(params.len(), grad.len(), "SGD gradient")?;
                params.iter_mut().zip(grad).for_each(|(p, g)| *p -= lr * g);
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut state = AdamState::new(3, 0.9, 0.999, 1e-8);
        let mut p = vec![1.0, -2.0, 0.5];
        let g = [0.3, -7.0, 1e-3];
        adam_step(&mut state, &mut p, &g, 1e-2).unwrap();
        let expected = [1.0 - 1e-2, -2.0 + 1e-2, 0.5 - 1e-2];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn zero_gradient_never_moves() {
        let mut state = AdamState::new(2, 0.9, 0.999, 1e-8);
        let mut p = vec![0.25, -4.0];
        for _ in 0..1000 {
            adam_step(&mut state, &mut p, &[0.0, 0.0], 0.1).unwrap();
        }
        assert_eq!(p, vec![0.25, -4.0]);
    }

    #[test]
    fn identical_runs_match_bitwise() {
        let run = || {
            let mut state = AdamState::new(2, 0.9, 0.999, 1e-8);
            let mut p = vec![3.0, -1.0];
            for k in 0..500 {
                let g = [p[0] * 2.0 + (k as f64).sin(), p[1] - 0.5];
                adam_step(&mut state, &mut p, &g, 1e-2).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn shape_mismatch() {
        let mut state = AdamState::new(2, 0.9, 0.999, 1e-8);
        assert!(adam_step(&mut state, &mut [0.0], &[0.0], 0.1).is_err());
    }

    #[test]
    fn sgd_is_plain_descent() {
        let mut opt = Optimizer::new(OptimizerKind::Sgd, 2, 0.9, 0.999, 1e-8);
        let mut p = vec![1.0, 1.0];
        opt.step(&mut p, &[2.0, -4.0], 0.5).unwrap();
        assert_eq!(p, vec![0.0, 3.0]);
    }
}
