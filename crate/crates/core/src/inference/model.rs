use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::detection::{outcome_distribution, single_atom_outcome, DetectionParams, OutcomeCounts, OutcomeDistribution};
use crate::error::{check_probability, domain, Result};
use crate::par;
use crate::pulse::{
    apply_sequence, ramsey_sequence, single_atom_populations, PulseMode, PulseSequence, RamanPulse,
    HALF_PI,
};
use crate::relaxation::{prepared_state, RateConfig};
use crate::spin::{parity_dephasing, SpinLevel};

/// Scanned quantity and the unit of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanVariable {
    /// Single Raman pulse of duration τ, grid in µs.
    PulseDuration,
    /// Ramsey sequence at Raman detuning δ, grid in kHz.
    RamanDetuning,
}

impl ScanVariable {
    /// Column label used in data files.
    pub fn axis_label(self) -> &'static str {
        match self {
            ScanVariable::PulseDuration => "tau_us",
            ScanVariable::RamanDetuning => "delta_khz",
        }
    }

    pub fn from_axis_label(label: &str) -> Option<Self> {
        match label {
            "tau_us" => Some(ScanVariable::PulseDuration),
            "delta_khz" => Some(ScanVariable::RamanDetuning),
            _ => None,
        }
    }
}

/// What the Ramsey sequence acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RamseyProbe {
    /// The collisionally prepared pair.
    #[default]
    Pair,
    /// A lone atom starting in `|1⟩`; its survival is the transfer probability.
    SingleAtom,
}

/// A scan grid plus the protocol parameters held fixed along it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub variable: ScanVariable,
    pub grid: Vec<f64>,
    /// Ω, rad/s.
    pub rabi_rate: f64,
    /// Raman detuning during pulse scans, rad/s (used in full mode only).
    pub pulse_detuning: f64,
    /// Ramsey wait time, µs.
    pub wait_us: f64,
    /// Resonant area of each Ramsey pulse, rad.
    pub pulse_area: f64,
    /// Strength of the parity-dephasing step between hold and pulses.
    pub destruction: f64,
    /// Collision hold time, s.
    pub hold_time_s: f64,
    pub mode: PulseMode,
    pub probe: RamseyProbe,
}

impl ScanSpec {
    /// Pulse-duration scan with the given Ω and 100 ms hold.
    pub fn pulse_scan(grid: Vec<f64>, rabi_rate: f64) -> Self {
        ScanSpec {
            variable: ScanVariable::PulseDuration,
            grid,
            rabi_rate,
            pulse_detuning: 0.0,
            wait_us: 5.0,
            pulse_area: HALF_PI,
            destruction: 0.0,
            hold_time_s: 0.1,
            mode: PulseMode::Ideal,
            probe: RamseyProbe::Pair,
        }
    }

    /// Ramsey detuning scan with wait time `wait_us`.
    pub fn ramsey_scan(grid: Vec<f64>, rabi_rate: f64, wait_us: f64) -> Self {
        ScanSpec {
            variable: ScanVariable::RamanDetuning,
            wait_us,
            ..ScanSpec::pulse_scan(grid, rabi_rate)
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_grid(&self.grid)?;
        if !(self.rabi_rate.is_finite() && self.rabi_rate > 0.0) {
            return domain(format!("Rabi rate {} must be positive", self.rabi_rate));
        }
        if !(self.wait_us.is_finite() && self.wait_us >= 0.0) {
            return domain(format!("wait time {} must be nonnegative", self.wait_us));
        }
        if !(self.hold_time_s.is_finite() && self.hold_time_s >= 0.0) {
            return domain(format!("hold time {} must be nonnegative", self.hold_time_s));
        }
        if !self.pulse_detuning.is_finite() {
            return domain("pulse detuning must be finite");
        }
        check_probability("destruction strength", self.destruction)
    }

    /// The pulse sequence at grid value `x`.
    pub fn sequence_at(&self, x: f64) -> Result<PulseSequence> {
        match self.variable {
            ScanVariable::PulseDuration => {
                if x < 0.0 {
                    return domain(format!("pulse duration {x} µs is negative"));
                }
                Ok(PulseSequence::single(RamanPulse {
                    rabi_rate: self.rabi_rate,
                    detuning: self.pulse_detuning,
                    duration: x * 1e-6,
                    phase: 0.0,
                }))
            }
            ScanVariable::RamanDetuning => ramsey_sequence(
                self.rabi_rate,
                2.0 * PI * x * 1e3,
                self.wait_us * 1e-6,
                self.pulse_area,
            ),
        }
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return domain("scan grid is empty");
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return domain("scan grid has non-finite values");
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("scan grid must be strictly increasing");
    }
    Ok(())
}

/// Measured or synthetic counts along a scan grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountData {
    pub x: Vec<f64>,
    pub counts: Vec<OutcomeCounts>,
}

impl CountData {
    pub fn new(x: Vec<f64>, counts: Vec<OutcomeCounts>) -> Result<Self> {
        if x.len() != counts.len() {
            return domain(format!(
                "{} grid values but {} count rows",
                x.len(),
                counts.len()
            ));
        }
        validate_grid(&x)?;
        if let Some(i) = counts.iter().position(|c| c.shots() == 0) {
            return domain(format!("row {i} has zero shots"));
        }
        Ok(CountData { x, counts })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Observed fraction in `channel` at each point.
    pub fn fractions(&self, channel: usize) -> Vec<f64> {
        self.counts
            .iter()
            .map(|c| c.as_array()[channel] as f64 / c.shots() as f64)
            .collect()
    }
}

/// Outcome distribution at every grid point for coherence fraction `f`.
///
/// Pipeline: prepared state → optional parity dephasing → pulse sequence →
/// detection. For a single-atom Ramsey probe the pair preparation is skipped.
pub fn model_curves(
    spec: &ScanSpec,
    rates: &RateConfig,
    det: &DetectionParams,
    f: f64,
) -> Result<Vec<OutcomeDistribution>> {
    spec.validate()?;
    det.validate()?;
    let single_atom =
        spec.variable == ScanVariable::RamanDetuning && spec.probe == RamseyProbe::SingleAtom;
    if single_atom {
        return par::try_map(&spec.grid, |&x| {
            let seq = spec.sequence_at(x)?;
            let pops = single_atom_populations(SpinLevel::PLUS_ONE, &seq, spec.mode)?;
            single_atom_outcome(&pops, det)
        });
    }
    let rates = RateConfig { coherence_fraction: f, ..*rates };
    let spectator = det.spectator_distribution()?;
    let prepared = prepared_state(&rates, spec.hold_time_s, det.prep_error, &spectator)?;
    let rho = if spec.destruction > 0.0 {
        parity_dephasing(&prepared, spec.destruction)?
    } else {
        prepared
    };
    par::try_map(&spec.grid, |&x| {
        let seq = spec.sequence_at(x)?;
        let out = apply_sequence(&rho, &seq, spec.mode)?;
        outcome_distribution(&out, det)
    })
}
