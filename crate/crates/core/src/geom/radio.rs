use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Link-budget parameters shared by the mm-wave and low-band models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioParams {
    pub mm_frequency_hz: f64,
    pub mm_tx_power_dbm: f64,
    pub noise_dbm: f64,
    /// Extra loss applied per specular reflection.
    pub reflection_loss_db: f64,
    /// SNR reported for unreachable links; also the lower clamp for reachable ones.
    pub snr_floor_db: f64,
    pub lb_frequency_hz: f64,
    pub lb_tx_power_dbm: f64,
    pub lb_path_loss_exponent: f64,
    pub lb_reference_distance_m: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            mm_frequency_hz: 28e9,
            mm_tx_power_dbm: 24.0,
            noise_dbm: -80.0,
            reflection_loss_db: 10.0,
            snr_floor_db: -40.0,
            lb_frequency_hz: 2e9,
            lb_tx_power_dbm: 46.0,
            lb_path_loss_exponent: 3.5,
            lb_reference_distance_m: 1.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.mm_tx_power_dbm,
            self.noise_dbm,
            self.reflection_loss_db,
            self.snr_floor_db,
            self.lb_tx_power_dbm,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("radio powers and losses must be finite".into()));
        }
        if !(self.mm_frequency_hz > 0.0 && self.lb_frequency_hz > 0.0) {
            return Err(Error::InvalidConfig("carrier frequencies must be positive".into()));
        }
        if !(self.lb_path_loss_exponent > 0.0 && self.lb_reference_distance_m > 0.0) {
            return Err(Error::InvalidConfig("low-band path-loss parameters must be positive".into()));
        }
        Ok(())
    }

    pub fn mm_wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.mm_frequency_hz
    }
}

/// Friis free-space power gain (linear) over `distance` meters.
pub fn friis_gain(wavelength: f64, distance: f64) -> f64 {
    let r = wavelength / (4.0 * std::f64::consts::PI * distance);
    r * r
}

/// Free-space path loss in dB.
pub fn free_space_loss_db(frequency_hz: f64, distance: f64) -> f64 {
    -10.0 * friis_gain(SPEED_OF_LIGHT / frequency_hz, distance).log10()
}

/// Log-distance path loss: free-space loss at the reference distance plus
/// `10 n log10(d / d0)`. Distances below `d0` are clamped to `d0`.
pub fn log_distance_loss_db(frequency_hz: f64, exponent: f64, reference: f64, distance: f64) -> f64 {
    let d = distance.max(reference);
    free_space_loss_db(frequency_hz, reference) + 10.0 * exponent * (d / reference).log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn friis_at_28ghz_100m() {
        // 20 log10(4 pi d / lambda) with lambda = c / 28 GHz
        let lambda = SPEED_OF_LIGHT / 28e9;
        let expected = 20.0 * (4.0 * std::f64::consts::PI * 100.0 / lambda).log10();
        assert!((free_space_loss_db(28e9, 100.0) - expected).abs() < 1e-9);
        assert!((expected - 101.39).abs() < 0.01);
    }

    #[test]
    fn doubling_distance_costs_35_log2() {
        let l1 = log_distance_loss_db(2e9, 3.5, 1.0, 10.0);
        let l2 = log_distance_loss_db(2e9, 3.5, 1.0, 20.0);
        assert!((l2 - l1 - 35.0 * 2f64.log10()).abs() < 1e-12);
        assert!((l2 - l1 - 10.54).abs() < 0.005);
    }
}
