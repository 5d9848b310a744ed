use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::io::{atomic_write, fmt_f64};

/// Two binary classification tasks on 2-D inputs whose decision
/// boundaries are `conflict_angle` radians apart.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    /// Row-major `sample_count x 2`.
    inputs: Vec<f64>,
    /// `labels[t][i]` is the class of sample `i` for task `t`.
    labels: Vec<Vec<usize>>,
    pub conflict_angle: f64,
    pub noise_std: f64,
    pub seed: u64,
}

/// A borrowed view of inputs and per-task labels.
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a> {
    pub input_dim: usize,
    pub inputs: &'a [f64],
    pub labels: &'a [Vec<usize>],
}

impl Batch<'_> {
    pub fn len(&self) -> usize {
        if self.input_dim == 0 {
            0
        } else {
            self.inputs.len() / self.input_dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.input_dim..(i + 1) * self.input_dim]
    }
}

pub fn make_synthetic_dataset(
    conflict_angle: f64,
    sample_count: usize,
    noise_std: f64,
    seed: u64,
) -> Result<SyntheticDataset> {
    if sample_count == 0 {
        return Err(Error::invalid("dataset needs at least one sample"));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::invalid(format!("noise std must be >= 0, got {noise_std}")));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&conflict_angle) {
        return Err(Error::invalid(format!(
            "conflict angle must lie in [0, pi/2], got {conflict_angle}"
        )));
    }
    let directions = [[1.0, 0.0], [conflict_angle.cos(), conflict_angle.sin()]];
    let noise = Normal::new(0.0, noise_std).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut inputs = Vec::with_capacity(2 * sample_count);
    let mut labels = vec![Vec::with_capacity(sample_count); 2];
    for _ in 0..sample_count {
        let x = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
        inputs.extend_from_slice(&x);
        for (d, lab) in directions.iter().zip(labels.iter_mut()) {
            let score = x[0] * d[0] + x[1] * d[1] + noise.sample(&mut rng);
            lab.push(usize::from(score > 0.0));
        }
    }
    Ok(SyntheticDataset {
        inputs,
        labels,
        conflict_angle,
        noise_std,
        seed,
    })
}

impl SyntheticDataset {
    pub fn len(&self) -> usize {
        self.inputs.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn tasks(&self) -> usize {
        self.labels.len()
    }

    pub fn input(&self, i: usize) -> [f64; 2] {
        [self.inputs[2 * i], self.inputs[2 * i + 1]]
    }

    pub fn labels(&self, task: usize) -> &[usize] {
        &self.labels[task]
    }

    pub fn batch(&self) -> Batch<'_> {
        Batch {
            input_dim: 2,
            inputs: &self.inputs,
            labels: &self.labels,
        }
    }

    /// CSV text with header `x1,x2,y1,y2`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x1", "x2", "y1", "y2"])?;
        for i in 0..self.len() {
            let [x1, x2] = self.input(i);
            w.write_record([
                fmt_f64(x1),
                fmt_f64(x2),
                self.labels[0][i].to_string(),
                self.labels[1][i].to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii csv"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.to_csv()?.as_bytes())
    }
}
