use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed horizontal beam codebook of an access point.
///
/// Beam `m` has its center at `(m - (M-1)/2) * step_deg` relative to the
/// boresight and a rectangular main lobe covering the half-open interval
/// `[center - step/2, center + step/2)`. Adjacent lobes therefore tile the
/// covered range with no gap and no overlap. Outside its lobe a beam has
/// `floor_db` gain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamCodebook {
    pub beams: usize,
    pub step_deg: f64,
    pub peak_db: f64,
    pub floor_db: f64,
    /// Elevation tilt of the beams. Carried for completeness; the gain
    /// profile is azimuth-only.
    pub downtilt_deg: f64,
}

impl Default for BeamCodebook {
    fn default() -> Self {
        Self { beams: 19, step_deg: 10.0, peak_db: 18.0, floor_db: -10.0, downtilt_deg: 8.0 }
    }
}

impl BeamCodebook {
    pub fn validate(&self) -> Result<()> {
        if self.beams == 0 {
            return Err(Error::InvalidConfig("codebook needs at least one beam".into()));
        }
        if !(self.step_deg > 0.0 && self.step_deg * self.beams as f64 <= 360.0) {
            return Err(Error::InvalidConfig("codebook step must be positive and fit in 360 degrees".into()));
        }
        if !(self.peak_db.is_finite() && self.floor_db.is_finite() && self.peak_db > self.floor_db) {
            return Err(Error::InvalidConfig("codebook peak gain must exceed floor gain".into()));
        }
        Ok(())
    }

    /// Beam center relative to boresight, degrees.
    pub fn center_deg(&self, beam: usize) -> f64 {
        (beam as f64 - (self.beams as f64 - 1.0) / 2.0) * self.step_deg
    }

    /// Total angular range covered by the main lobes, degrees.
    pub fn coverage_deg(&self) -> f64 {
        self.beams as f64 * self.step_deg
    }

    /// The beam whose main lobe contains `rel_az_deg`, if any.
    pub fn beam_covering(&self, rel_az_deg: f64) -> Option<usize> {
        let offset = rel_az_deg / self.step_deg + self.beams as f64 / 2.0;
        if offset >= 0.0 && offset < self.beams as f64 {
            Some((offset.floor() as usize).min(self.beams - 1))
        } else {
            None
        }
    }

    /// Gain in dB of `beam` toward `rel_az_deg` (relative to boresight, in [-180, 180]).
    pub fn gain_db(&self, beam: usize, rel_az_deg: f64) -> f64 {
        if self.beam_covering(rel_az_deg) == Some(beam) {
            self.peak_db
        } else {
            self.floor_db
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_reference_antenna() {
        let cb = BeamCodebook::default();
        assert_eq!(cb.beams, 19);
        assert_eq!(cb.step_deg, 10.0);
        assert_eq!(cb.peak_db, 18.0);
        assert_eq!(cb.downtilt_deg, 8.0);
        assert_eq!(cb.center_deg(9), 0.0);
        assert_eq!(cb.center_deg(0), -90.0);
        assert_eq!(cb.center_deg(18), 90.0);
        assert!(cb.coverage_deg() >= 180.0);
    }

    #[test]
    fn lobes_tile_without_gaps_or_overlap() {
        let cb = BeamCodebook::default();
        let half = cb.coverage_deg() / 2.0;
        let mut a = -half;
        while a < half {
            let covering: Vec<_> =
                (0..cb.beams).filter(|&m| cb.gain_db(m, a) == cb.peak_db).collect();
            assert_eq!(covering.len(), 1, "azimuth {a}");
            a += 0.25;
        }
        assert_eq!(cb.beam_covering(half), None);
        assert_eq!(cb.beam_covering(-half - 0.1), None);
    }

    #[test]
    fn beam_center_gets_peak() {
        let cb = BeamCodebook::default();
        for m in 0..cb.beams {
            assert_eq!(cb.gain_db(m, cb.center_deg(m)), 18.0);
            if m + 1 < cb.beams {
                assert_eq!(cb.gain_db(m + 1, cb.center_deg(m)), -10.0);
            }
        }
    }

    #[test]
    fn invalid_codebooks() {
        let mut cb = BeamCodebook::default();
        cb.beams = 0;
        assert!(cb.validate().is_err());
        let mut cb = BeamCodebook::default();
        cb.floor_db = 20.0;
        assert!(cb.validate().is_err());
    }
}
