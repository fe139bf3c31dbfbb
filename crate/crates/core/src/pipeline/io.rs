//! Dataset and report files.
//!
//! Dataset CSV: a header row, then one row per episode holding the feature
//! columns in [`FeatureVector::names`] order followed by `label`, the
//! combination index. Floats use the shortest representation that parses
//! back to the same value, so files round-trip exactly.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::kpi::KpiReport;
use super::realization::EpisodeRecord;
use crate::error::{Error, Result};
use crate::forest::{Dataset, FeatureVector};

pub fn write_dataset_csv<W: Write>(out: W, mmaps: usize, beams: usize, episodes: &[EpisodeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = FeatureVector::names(mmaps, beams);
    header.push("label".into());
    w.write_record(&header)?;
    let dim = FeatureVector::dim(mmaps, beams);
    let mut row: Vec<String> = Vec::with_capacity(dim + 1);
    for e in episodes {
        if e.features.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: e.features.len() });
        }
        row.clear();
        row.extend(e.features.as_slice().iter().map(|v| v.to_string()));
        row.push(e.label.0.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset CSV. The last column is the label; every other column is
/// a feature. `n_classes` bounds the labels.
pub fn read_dataset_csv<R: Read>(input: R, n_classes: usize) -> Result<Dataset> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.len() < 2 || &header[header.len() - 1] != "label" {
        return Err(Error::Malformed("dataset header must end with a label column".into()));
    }
    let dim = header.len() - 1;
    let mut ds = Dataset::new(dim, n_classes);
    let mut x = vec![0.0; dim];
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        for (j, v) in x.iter_mut().enumerate() {
            *v = rec[j]
                .parse()
                .map_err(|_| Error::Malformed(format!("row {}: bad value {:?}", line + 1, &rec[j])))?;
        }
        let label: usize = rec[dim]
            .parse()
            .map_err(|_| Error::Malformed(format!("row {}: bad label {:?}", line + 1, &rec[dim])))?;
        ds.push(&x, label)?;
    }
    Ok(ds)
}

/// Flat report row shared by evaluation and sweep CSVs. Columns that do not
/// apply to a row are left empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpiRow {
    pub policy: String,
    pub beta: Option<f64>,
    pub train_size: Option<usize>,
    pub trees: Option<usize>,
    pub episodes: usize,
    pub completed: usize,
    pub completed_fraction: f64,
    pub failed_fraction: Option<f64>,
    pub low_band_fraction: Option<f64>,
    pub mean_cost: f64,
    pub transmissions: u64,
    pub failures: u64,
    pub low_band_transmissions: u64,
    pub genie_infeasible: usize,
}

impl KpiRow {
    pub fn new(policy: &str, beta: Option<f64>, report: &KpiReport) -> Self {
        Self {
            policy: policy.to_string(),
            beta,
            train_size: None,
            trees: None,
            episodes: report.episodes,
            completed: report.completed,
            completed_fraction: report.completed_fraction,
            failed_fraction: report.failed_fraction,
            low_band_fraction: report.low_band_fraction,
            mean_cost: report.mean_cost,
            transmissions: report.transmissions,
            failures: report.failures,
            low_band_transmissions: report.low_band_transmissions,
            genie_infeasible: report.genie_infeasible,
        }
    }

    pub fn with_grid(mut self, train_size: usize, trees: usize) -> Self {
        self.train_size = Some(train_size);
        self.trees = Some(trees);
        self
    }
}

pub fn write_kpi_csv<W: Write>(out: W, rows: &[KpiRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_kpi_csv<R: Read>(input: R) -> Result<Vec<KpiRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
