use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub features: Vec<f64>,
    pub label: usize,
}

/// Row-major feature matrix with integer class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    n_classes: usize,
    values: Vec<f64>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(dim: usize, n_classes: usize) -> Self {
        Self { dim, n_classes, values: Vec::new(), labels: Vec::new() }
    }

    pub fn from_samples(samples: &[TrainingSample], n_classes: usize) -> Result<Self> {
        let dim = samples.first().map_or(0, |s| s.features.len());
        let mut ds = Self::new(dim, n_classes);
        for s in samples {
            ds.push(&s.features, s.label)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, features: &[f64], label: usize) -> Result<()> {
        if features.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: features.len() });
        }
        if label >= self.n_classes {
            return Err(Error::Malformed(format!("label {label} outside 0..{}", self.n_classes)));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Malformed("non-finite feature value".into()));
        }
        self.values.extend_from_slice(features);
        self.labels.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.values[row * self.dim + feature]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.dim..(row + 1) * self.dim]
    }

    #[inline]
    pub fn label(&self, row: usize) -> usize {
        self.labels[row]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// The rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut ds = Self::new(self.dim, self.n_classes);
        for &i in indices {
            ds.values.extend_from_slice(self.row(i));
            ds.labels.push(self.labels[i]);
        }
        ds
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}
