use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::objectives::VectorLoss;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEntry {
    pub iteration: u64,
    /// Loss of every member (or of the single model for baselines).
    pub member_losses: Vec<VectorLoss>,
    pub total: f64,
    pub reg: f64,
}

/// Logged training progress, with strictly increasing iterations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryRecord {
    entries: Vec<TrajectoryEntry>,
}

impl TrajectoryRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: TrajectoryEntry) -> Result<()> {
        if let Some(last) = self.entries.last() {
            if entry.iteration <= last.iteration {
                return Err(Error::invalid(format!(
                    "trajectory iteration {} does not follow {}",
                    entry.iteration, last.iteration
                )));
            }
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[TrajectoryEntry] {
        &self.entries
    }

    pub fn last(&self) -> Option<&TrajectoryEntry> {
        self.entries.last()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// CSV with header `iter,member,loss_1,…,loss_T,total,reg`, one row per
    /// member per logged iteration.
    pub fn to_csv(&self, tasks: usize) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["iter".to_string(), "member".to_string()];
        header.extend((1..=tasks).map(|t| format!("loss_{t}")));
        header.extend(["total".to_string(), "reg".to_string()]);
        w.write_record(&header)?;
        for e in &self.entries {
            for (m, losses) in e.member_losses.iter().enumerate() {
                Error::check_dim(tasks, losses.tasks(), "trajectory losses")?;
                let mut row = vec![e.iteration.to_string(), m.to_string()];
                row.extend(losses.iter().map(|v| fmt_f64(*v)));
                row.extend([fmt_f64(e.total), fmt_f64(e.reg)]);
                w.write_record(&row)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii csv"))
    }
}
