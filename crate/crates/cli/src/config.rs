//! The run configuration file: one strict JSON document.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use pairspin::detection::DetectionParams;
use pairspin::pulse::PulseMode;
use pairspin::relaxation::RateConfig;
use pairspin::spin::ExperimentContext;
use pairspin::Error;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Pulse defaults shared by the scan commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    /// Ω, rad/s. The default makes a 40 µs pulse a π pulse.
    pub rabi_rate_rad_s: f64,
    /// Raman detuning during pulse scans, rad/s; only felt in full mode.
    pub detuning_rad_s: f64,
    pub mode: PulseMode,
    pub ramsey_wait_us: f64,
    /// Resonant area of each Ramsey pulse, rad.
    pub ramsey_pulse_area_rad: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        PulseConfig {
            rabi_rate_rad_s: PI / 40e-6,
            detuning_rad_s: 0.0,
            mode: PulseMode::Ideal,
            ramsey_wait_us: 5.0,
            ramsey_pulse_area_rad: PI / 2.0,
        }
    }
}

/// Everything a run needs besides its command-line arguments.
///
/// Sections may be omitted and then take their defaults; a section that is
/// present must be complete, and unknown keys are rejected everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub experiment: ExperimentContext,
    #[serde(default)]
    pub rates: RateConfig,
    #[serde(default)]
    pub detection: DetectionParams,
    #[serde(default)]
    pub pulse: PulseConfig,
    #[serde(default = "default_hold")]
    pub hold_time_s: f64,
    #[serde(default)]
    pub destruction_lambda: f64,
    /// Where outputs go when no `--out` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_hold() -> f64 {
    0.1
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: ExperimentContext::default(),
            rates: RateConfig::default(),
            detection: DetectionParams::default(),
            pulse: PulseConfig::default(),
            hold_time_s: default_hold(),
            destruction_lambda: 0.0,
            output_dir: None,
        }
    }
}

impl RunConfig {
    /// Reads and validates `path`, or returns the defaults when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::io(format!("cannot read config {}: {e}", path.display())).with_key("config")
        })?;
        let cfg = Self::parse(&text)?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let err = CliError::config(msg.clone());
            match backticked(&msg) {
                Some(key) => err.with_key(key),
                None => err,
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        section("experiment", self.experiment.validate())?;
        section("rates", self.rates.validate())?;
        section("detection", self.detection.validate())?;
        let p = &self.pulse;
        if !(p.rabi_rate_rad_s.is_finite() && p.rabi_rate_rad_s > 0.0) {
            return Err(invalid("pulse.rabi_rate_rad_s", p.rabi_rate_rad_s, "must be positive"));
        }
        if !p.detuning_rad_s.is_finite() {
            return Err(invalid("pulse.detuning_rad_s", p.detuning_rad_s, "must be finite"));
        }
        if !(p.ramsey_wait_us.is_finite() && p.ramsey_wait_us >= 0.0) {
            return Err(invalid("pulse.ramsey_wait_us", p.ramsey_wait_us, "must be nonnegative"));
        }
        if !(p.ramsey_pulse_area_rad.is_finite() && p.ramsey_pulse_area_rad >= 0.0) {
            return Err(invalid(
                "pulse.ramsey_pulse_area_rad",
                p.ramsey_pulse_area_rad,
                "must be nonnegative",
            ));
        }
        if !(self.hold_time_s.is_finite() && self.hold_time_s >= 0.0) {
            return Err(invalid("hold_time_s", self.hold_time_s, "must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.destruction_lambda) {
            return Err(invalid("destruction_lambda", self.destruction_lambda, "must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        crate::format::json_compact(self)
    }
}

fn invalid(key: &str, value: f64, what: &str) -> CliError {
    CliError::config(format!("{key} = {value} {what}")).with_key(key)
}

/// Core validation messages start with the offending field name.
fn section(name: &str, result: pairspin::Result<()>) -> Result<(), CliError> {
    result.map_err(|e| {
        let msg = match &e {
            Error::Domain(m) | Error::Undefined(m) | Error::InvalidState(m) | Error::Fit(m) => m.clone(),
        };
        let field = msg.split(" = ").next().filter(|f| !f.contains(' '));
        let err = CliError::config(format!("{name}: {msg}"));
        match field {
            Some(f) => err.with_key(format!("{name}.{f}")),
            None => err.with_key(name),
        }
    })
}

/// The first `name` in a serde message such as "unknown field `name`".
fn backticked(msg: &str) -> Option<&str> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(&msg[start..start + len])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::parse("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn serialized_form_is_a_fixed_point() {
        // 12 significant digits: Ω = π/40 µs does not survive exactly
        let text = RunConfig::default().to_json();
        assert_eq!(RunConfig::parse(&text).unwrap().to_json(), text);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::parse(r#"{"pulse": {"rabi": 1}}"#).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("rabi"));
    }

    #[test]
    fn negative_rate_is_named() {
        let mut cfg = RunConfig::default();
        cfg.rates.chi1_to_chi2 = -1.0;
        let err = RunConfig::parse(&cfg.to_json()).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("rates.chi1_to_chi2"));
    }

    #[test]
    fn out_of_range_destruction_is_named() {
        let err = RunConfig::parse(r#"{"destruction_lambda": 1.5}"#).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("destruction_lambda"));
    }
}
