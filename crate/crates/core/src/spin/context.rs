use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Descriptive experiment parameters.
///
/// Nothing in the dynamics is derived from these values; they travel with
/// every run so outputs record the conditions they stand for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentContext {
    /// Motional temperature of the pair, µK.
    pub temperature_uk: f64,
    /// Tweezer depth in units of h·MHz.
    pub trap_depth_mhz: f64,
    /// Trap angular frequencies (x, y, z), rad/s.
    pub trap_frequencies_rad_s: [f64; 3],
    /// Bias field while collisions run, G.
    pub collision_bias_field_g: f64,
    /// Bias field during Raman pulses and readout, G.
    pub pulse_bias_field_g: f64,
    /// Reduced mass of the pair, kg.
    pub reduced_mass_kg: f64,
    /// Linear Zeeman splitting per unit m at the pulse field, kHz.
    pub zeeman_splitting_khz: f64,
}

impl Default for ExperimentContext {
    fn default() -> Self {
        // 85Rb pair in a 1 µm waist, 1064 nm tweezer at h×22 MHz depth
        ExperimentContext {
            temperature_uk: 40.0,
            trap_depth_mhz: 22.0,
            trap_frequencies_rad_s: [6.43e5, 6.43e5, 1.54e5],
            collision_bias_field_g: 0.5,
            pulse_bias_field_g: 8.5,
            reduced_mass_kg: 7.06e-26,
            zeeman_splitting_khz: 3967.0,
        }
    }
}

impl ExperimentContext {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("temperature_uk", self.temperature_uk),
            ("trap_depth_mhz", self.trap_depth_mhz),
            ("trap_frequencies_rad_s[0]", self.trap_frequencies_rad_s[0]),
            ("trap_frequencies_rad_s[1]", self.trap_frequencies_rad_s[1]),
            ("trap_frequencies_rad_s[2]", self.trap_frequencies_rad_s[2]),
            ("reduced_mass_kg", self.reduced_mass_kg),
            ("zeeman_splitting_khz", self.zeeman_splitting_khz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} = {v} must be strictly positive"));
            }
        }
        for (name, v) in [
            ("collision_bias_field_g", self.collision_bias_field_g),
            ("pulse_bias_field_g", self.pulse_bias_field_g),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return domain(format!("{name} = {v} must be nonnegative"));
            }
        }
        Ok(())
    }
}
