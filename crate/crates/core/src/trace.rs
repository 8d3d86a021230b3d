//! In-memory power traces.

use crate::error::{Error, Result};

/// A sequence of linear received-power samples, optionally annotated with a
/// sample period and per-sample group labels.
///
/// Samples are strictly positive and finite; group labels (when present)
/// cover every sample, so any labeling partitions the trace into maximal
/// contiguous blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTrace {
    samples: Vec<f64>,
    sample_period: Option<f64>,
    groups: Option<Vec<u32>>,
}

impl PowerTrace {
    /// Builds a trace from linear samples, validating positivity.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        for (i, &x) in samples.iter().enumerate() {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "sample {i} must be positive finite linear power, got {x}"
                )));
            }
        }
        Ok(PowerTrace {
            samples,
            sample_period: None,
            groups: None,
        })
    }

    /// Attaches the sample period in seconds.
    pub fn with_sample_period(mut self, period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample period must resolve to a positive number of seconds, got {period}"
            )));
        }
        self.sample_period = Some(period);
        Ok(self)
    }

    /// Attaches one group label per sample.
    pub fn with_groups(mut self, groups: Vec<u32>) -> Result<Self> {
        if groups.len() != self.samples.len() {
            return Err(Error::InvalidInput(format!(
                "group labels ({}) must match sample count ({})",
                groups.len(),
                self.samples.len()
            )));
        }
        self.groups = Some(groups);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_period(&self) -> Option<f64> {
        self.sample_period
    }

    pub fn groups(&self) -> Option<&[u32]> {
        self.groups.as_deref()
    }

    /// Samples carrying the given group label, in trace order.
    pub fn group_samples(&self, group: u32) -> Vec<f64> {
        match &self.groups {
            None => Vec::new(),
            Some(labels) => self
                .samples
                .iter()
                .zip(labels)
                .filter(|(_, &g)| g == group)
                .map(|(&x, _)| x)
                .collect(),
        }
    }

    /// Distinct group labels present, ascending.
    pub fn group_ids(&self) -> Vec<u32> {
        match &self.groups {
            None => Vec::new(),
            Some(labels) => {
                let mut ids: Vec<u32> = labels.clone();
                ids.sort_unstable();
                ids.dedup();
                ids
            }
        }
    }

    /// The smallest sample (the deepest fade); `None` for an empty trace.
    pub fn min_sample(&self) -> Option<f64> {
        self.samples.iter().copied().reduce(f64::min)
    }
}
