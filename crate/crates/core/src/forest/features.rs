use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::MeasurementVector;
use crate::sched::QosRequirement;

/// Classifier input: N*M per-beam SNRs (access-point-major, beam-minor),
/// LB SNR, D, K, user x, user y.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn from_measurement(m: &MeasurementVector, qos: &QosRequirement) -> Self {
        let mut x = Vec::with_capacity(m.mm_snr_db.len() + 5);
        x.extend_from_slice(&m.mm_snr_db);
        x.push(m.lb_snr_db);
        x.push(qos.packets as f64);
        x.push(qos.deadline as f64);
        x.push(m.position[0]);
        x.push(m.position[1]);
        Self(x)
    }

    pub fn dim(mmaps: usize, beams: usize) -> usize {
        mmaps * beams + 5
    }

    pub fn names(mmaps: usize, beams: usize) -> Vec<String> {
        let mut names = Vec::with_capacity(Self::dim(mmaps, beams));
        for ap in 1..=mmaps {
            for b in 0..beams {
                names.push(format!("snr_ap{ap}_b{b}"));
            }
        }
        names.extend(["lb_snr", "d", "k", "pos_x", "pos_y"].map(String::from));
        names
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.0.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Malformed("feature vector has non-finite entries".into()))
        }
    }
}
