//! Pareto Manifold Learning: ensembles of weight vectors trained so that
//! their convex hull maps onto a continuous Pareto front of several tasks.
//!
//! A [`ParameterMatrix`] holds one parameter vector per member. Any
//! simplex [`Weighting`] interpolates the members into a single model, and
//! training ties that same weighting to the scalarization of the task
//! losses, so sweeping the hull sweeps the tradeoff.
//!
//! ```
//! use pareto_manifold::{make_grid, ParameterMatrix};
//!
//! let theta = ParameterMatrix::from_rows(vec![vec![0.0, 2.0], vec![4.0, -2.0]]).unwrap();
//! let grid = make_grid(2, 5).unwrap();
//! let mid = theta.interpolate(&grid.points()[2]).unwrap();
//! assert_eq!(mid.as_slice(), &[2.0, 0.0]);
//! ```

pub mod balancing;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod io;
pub mod metrics;
pub mod objectives;
pub mod simplex;
pub mod trainer;

pub use ensemble::{ParameterMatrix, ParameterVector, TaskWeightMatrix};
pub use error::{Error, Result};
pub use metrics::{
    dominates, evaluate_subspace, hypervolume, oracle_front_toy, pareto_filter, Direction, FrontSample,
    HypervolumeSpec,
};
pub use objectives::{Objective, VectorGradient, VectorLoss};
pub use simplex::{make_grid, sample_dirichlet, DirichletParams, SimplexGrid, Weighting};
pub use trainer::{run_baseline, run_pml, BaselineMethod, TrainerConfig};
