//! Ensemble members and their convex hull in weight space.

use std::io::{Read, Write};
use std::ops::Deref;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::simplex::Weighting;

/// Magic prefix of the parameter-matrix binary format (UTF-8 encoded).
pub const MATRIX_MAGIC: &[u8] = "PMLΘ1".as_bytes();

/// A flat vector of model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("parameter vector has non-finite entries"));
        }
        Ok(Self(theta))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ParameterVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `M x N` matrix whose rows are the ensemble members' parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterMatrix {
    members: usize,
    params: usize,
    data: Vec<f64>,
}

impl ParameterMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::invalid(format!(
                "ensemble needs at least two members, got {}",
                rows.len()
            )));
        }
        let params = rows[0].len();
        if params == 0 {
            return Err(Error::invalid("members must have at least one parameter"));
        }
        let mut data = Vec::with_capacity(rows.len() * params);
        for row in &rows {
            Error::check_dim(params, row.len(), "member parameter count")?;
            data.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), params, data)
    }

    fn from_flat(members: usize, params: usize, data: Vec<f64>) -> Result<Self> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("parameter matrix has non-finite entries"));
        }
        Ok(Self {
            members,
            params,
            data,
        })
    }

    /// Draws every member independently with `init`.
    pub fn init_with<R, F>(members: usize, rng: &mut R, mut init: F) -> Result<Self>
    where
        R: Rng + ?Sized,
        F: FnMut(&mut R) -> Vec<f64>,
    {
        let rows = (0..members).map(|_| init(rng)).collect();
        Self::from_rows(rows)
    }

    pub fn members(&self) -> usize {
        self.members
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.data[m * self.params..(m + 1) * self.params]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.params)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Convex combination `aᵀΘ` of the members.
    pub fn interpolate(&self, a: &Weighting) -> Result<ParameterVector> {
        Error::check_dim(self.members, a.dim(), "interpolation weighting")?;
        let mut theta = vec![0.0; self.params];
        for (alpha, row) in a.iter().zip(self.rows()) {
            for (t, r) in theta.iter_mut().zip(row) {
                *t += alpha * r;
            }
        }
        Ok(ParameterVector(theta))
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(MATRIX_MAGIC)?;
        out.write_all(&(self.members as u64).to_le_bytes())?;
        out.write_all(&(self.params as u64).to_le_bytes())?;
        for v in &self.data {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(MATRIX_MAGIC.len() + 16 + 8 * self.data.len());
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut cursor = bytes;
        let mut magic = vec![0u8; MATRIX_MAGIC.len()];
        cursor.read_exact(&mut magic).map_err(|_| "truncated header")?;
        if magic != MATRIX_MAGIC {
            return Err("bad magic".into());
        }
        let mut word = [0u8; 8];
        cursor.read_exact(&mut word).map_err(|_| "truncated header")?;
        let members = u64::from_le_bytes(word) as usize;
        cursor.read_exact(&mut word).map_err(|_| "truncated header")?;
        let params = u64::from_le_bytes(word) as usize;
        let count = members
            .checked_mul(params)
            .filter(|c| c.checked_mul(8) == Some(cursor.len()))
            .ok_or_else(|| format!("payload length {} does not match {members}x{params}", cursor.len()))?;
        let data = cursor
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect::<Vec<_>>();
        debug_assert_eq!(data.len(), count);
        if members < 2 || params == 0 {
            return Err(format!("degenerate shape {members}x{params}"));
        }
        Self::from_flat(members, params, data).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes).map_err(|reason| Error::Malformed {
            path: path.to_path_buf(),
            reason,
        })
    }
}

/// Rows are the task weightings attached to each member (`M x T`).
#[derive(Debug, Clone, PartialEq)]
pub struct TaskWeightMatrix {
    rows: Vec<Weighting>,
}

impl TaskWeightMatrix {
    pub fn new(rows: Vec<Weighting>) -> Result<Self> {
        let tasks = rows.first().map(Weighting::dim).ok_or_else(|| Error::invalid("empty task weight matrix"))?;
        for row in &rows {
            Error::check_dim(tasks, row.dim(), "task weighting row")?;
        }
        Ok(Self { rows })
    }

    /// Single-task members: member `t` is anchored to task `t`.
    pub fn identity(tasks: usize) -> Self {
        let rows = (0..tasks)
            .map(|t| Weighting::vertex(tasks, t).expect("index in range"))
            .collect();
        Self { rows }
    }

    pub fn members(&self) -> usize {
        self.rows.len()
    }

    pub fn tasks(&self) -> usize {
        self.rows[0].dim()
    }

    pub fn rows(&self) -> &[Weighting] {
        &self.rows
    }
}

/// Loss weighting `aᵀW` induced by interpolation coefficients `a`.
pub fn effective_loss_weighting(a: &Weighting, w: &TaskWeightMatrix) -> Result<Weighting> {
    Error::check_dim(w.members(), a.dim(), "interpolation weighting")?;
    let mut out = vec![0.0; w.tasks()];
    for (alpha, row) in a.iter().zip(w.rows()) {
        for (o, r) in out.iter_mut().zip(row.iter()) {
            *o += alpha * r;
        }
    }
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|o| *o /= sum);
    Weighting::new(out)
}
