//! Per-epoch convergence records.

use crate::{Error, Result, Scalar};

/// `A_t`, `B_t` and `C_t` at one epoch boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Potentials<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord<T> {
    pub epoch: usize,
    pub objective: T,
    /// `F(w) − F̂` when a reference is available.
    pub gap: Option<T>,
    pub potentials: Option<Potentials<T>>,
    /// Wall-clock seconds since the start of the run.
    pub elapsed_secs: f64,
}

/// Records with strictly increasing epoch indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace<T> {
    records: Vec<EpochRecord<T>>,
}

impl<T: Scalar> Trace<T> {
    pub fn new() -> Self {
        Self {
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: EpochRecord<T>) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.epoch <= last.epoch {
                return Err(Error::Misuse(format!(
                    "trace epochs must increase: {} after {}",
                    record.epoch, last.epoch
                )));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[EpochRecord<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&EpochRecord<T>> {
        self.records.last()
    }

    pub fn epochs(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.epoch).collect()
    }

    pub fn objectives(&self) -> Vec<T> {
        self.records.iter().map(|r| r.objective).collect()
    }

    /// Gaps, or `None` if any record lacks one.
    pub fn gaps(&self) -> Option<Vec<T>> {
        self.records.iter().map(|r| r.gap).collect()
    }

    /// `C_t` values, or `None` if any record lacks potentials.
    pub fn c_values(&self) -> Option<Vec<T>> {
        self.records
            .iter()
            .map(|r| r.potentials.map(|p| p.c))
            .collect()
    }

    /// Recomputes every gap against a new reference objective.
    pub fn set_reference(&mut self, f_hat: T) {
        for r in &mut self.records {
            r.gap = Some(r.objective - f_hat);
        }
    }
}
