use serde::Serialize;

use crate::error::{Error, Result};

/// A nonempty sample of nonnegative integer counts, one entry per unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CountSample {
    values: Vec<u64>,
}

impl CountSample {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> u64 {
        self.values.iter().copied().min().unwrap_or(0)
    }

    pub fn max(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().map(|&v| v as f64).sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    /// Variance with divisor n.
    pub fn population_variance(&self) -> f64 {
        let mean = self.mean();
        self.values
            .iter()
            .map(|&v| (v as f64 - mean).powi(2))
            .sum::<f64>()
            / self.len() as f64
    }

    /// Distinct values in ascending order with their multiplicities.
    pub fn tally(&self) -> Tally {
        let mut sorted = self.values.clone();
        sorted.sort_unstable();
        let mut entries: Vec<(u64, u64)> = Vec::new();
        for v in sorted {
            match entries.last_mut() {
                Some((last, count)) if *last == v => *count += 1,
                _ => entries.push((v, 1)),
            }
        }
        Tally {
            entries,
            n: self.len() as u64,
        }
    }
}

/// Frequency view of a sample: ascending distinct values and their counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    entries: Vec<(u64, u64)>,
    n: u64,
}

impl Tally {
    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn min(&self) -> u64 {
        self.entries[0].0
    }

    pub fn sum(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(v, c)| v as f64 * c as f64)
            .sum()
    }
}
