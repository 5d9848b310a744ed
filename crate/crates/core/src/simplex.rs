//! Points on the probability simplex: weightings, Dirichlet sampling and
//! deterministic barycentric grids.

use std::ops::Deref;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the unit-sum constraint.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A point on the `T`-dimensional probability simplex.
///
/// The same type serves as a loss weighting and as interpolation
/// coefficients over ensemble members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Weighting(Vec<f64>);

impl Weighting {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::invalid("weighting must have at least one component"));
        }
        if let Some(bad) = alpha.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(Error::invalid(format!(
                "weighting component {bad} is negative or non-finite"
            )));
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(format!("weighting sums to {sum}, not 1")));
        }
        Ok(Self(alpha))
    }

    /// Scales non-negative `raw` values onto the simplex.
    pub fn normalized(raw: Vec<f64>) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) || raw.iter().any(|v| *v < 0.0) {
            return Err(Error::invalid("cannot normalize onto the simplex"));
        }
        Self::new(raw.into_iter().map(|v| v / sum).collect())
    }

    /// One-hot weighting selecting coordinate `index` out of `dim`.
    pub fn vertex(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::invalid(format!("vertex {index} out of range for {dim}")));
        }
        let mut alpha = vec![0.0; dim];
        alpha[index] = 1.0;
        Ok(Self(alpha))
    }

    /// Uniform weighting `1/dim` in every coordinate.
    pub fn uniform(dim: usize) -> Result<Self> {
        Self::normalized(vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Weighting {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Weighting {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Weighting> for Vec<f64> {
    fn from(w: Weighting) -> Self {
        w.0
    }
}

/// Concentration parameters of a Dirichlet distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DirichletParams(Vec<f64>);

impl DirichletParams {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::invalid("Dirichlet needs at least two concentrations"));
        }
        if let Some(bad) = p.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::invalid(format!(
                "Dirichlet concentration {bad} must be strictly positive"
            )));
        }
        Ok(Self(p))
    }

    /// `Dir(p, …, p)` over `dim` coordinates.
    pub fn symmetric(p: f64, dim: usize) -> Result<Self> {
        Self::new(vec![p; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DirichletParams {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<DirichletParams> for Vec<f64> {
    fn from(p: DirichletParams) -> Self {
        p.0
    }
}

/// Draws one weighting from `Dir(params)`.
///
/// Each coordinate is an independent unit-scale gamma variate with the
/// matching shape; the vector is then divided by its sum.
pub fn sample_dirichlet<R: Rng + ?Sized>(params: &DirichletParams, rng: &mut R) -> Weighting {
    let gammas: Vec<Gamma<f64>> = params
        .0
        .iter()
        .map(|&shape| Gamma::new(shape, 1.0).expect("shape validated positive"))
        .collect();
    loop {
        let draws: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
        let sum: f64 = draws.iter().sum();
        // Very small shapes can underflow every variate to zero.
        if sum > 0.0 && sum.is_finite() {
            return Weighting(draws.into_iter().map(|v| v / sum).collect());
        }
    }
}

/// Equidistant barycentric grid over the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexGrid {
    resolution: usize,
    points: Vec<Weighting>,
}

impl SimplexGrid {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[Weighting] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Builds the grid with `resolution` points along every edge of the
/// `tasks`-simplex (step `1/(resolution-1)`).
///
/// Points are ordered lexicographically descending, so the first point is
/// the first vertex `(1, 0, …, 0)`.
pub fn make_grid(tasks: usize, resolution: usize) -> Result<SimplexGrid> {
    if tasks < 2 {
        return Err(Error::invalid(format!("grid needs T >= 2, got {tasks}")));
    }
    if resolution < 2 {
        return Err(Error::invalid(format!("grid needs n >= 2, got {resolution}")));
    }
    let steps = resolution - 1;
    let mut points = Vec::new();
    let mut counts = Vec::with_capacity(tasks);
    compositions(steps, tasks, &mut counts, &mut |c| {
        let mut alpha: Vec<f64> = c.iter().map(|&k| k as f64 / steps as f64).collect();
        // Exact renormalization caps accumulated rounding.
        let sum: f64 = alpha.iter().sum();
        alpha.iter_mut().for_each(|a| *a /= sum);
        points.push(Weighting(alpha));
    });
    Ok(SimplexGrid { resolution, points })
}

fn compositions(remaining: usize, parts: usize, prefix: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if parts == 1 {
        prefix.push(remaining);
        emit(prefix);
        prefix.pop();
        return;
    }
    for k in (0..=remaining).rev() {
        prefix.push(k);
        compositions(remaining - k, parts - 1, prefix, emit);
        prefix.pop();
    }
}
