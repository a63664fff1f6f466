//! Raman rotations and free precession on the `|1⟩ ↔ |−1⟩` transition.
//!
//! Convention: a segment with Rabi rate `Ω`, detuning `δ` and phase `φ`
//! evolves under `H = −(Ω/2)(cos φ X + sin φ Y) + (δ/2) Z` on the
//! `(|1⟩, |−1⟩)` block, so a resonant pulse maps
//! `|±1⟩ → cos(Ωτ/2)|±1⟩ + i sin(Ωτ/2)|∓1⟩` and a pulse with `Ω = 0` is the
//! same as free evolution. Levels `|0⟩`, `|±2⟩` are left untouched.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spin::{kron, AtomOp, DensityMatrix, SpinLevel};

/// Evaluation mode for detuning inside pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseMode {
    /// Pulses are perfect resonant rotations; detuning acts only while waiting.
    #[default]
    Ideal,
    /// Detuning acts inside pulses too.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamanPulse {
    /// Ω, rad/s.
    pub rabi_rate: f64,
    /// δ, rad/s.
    pub detuning: f64,
    /// τ, s.
    pub duration: f64,
    /// φ, rad.
    pub phase: f64,
}

impl RamanPulse {
    pub fn resonant(rabi_rate: f64, duration: f64) -> Self {
        RamanPulse { rabi_rate, detuning: 0.0, duration, phase: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rabi_rate.is_finite() && self.rabi_rate >= 0.0) {
            return domain(format!("Rabi rate {} must be nonnegative", self.rabi_rate));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return domain(format!("pulse duration {} must be nonnegative", self.duration));
        }
        if !(self.detuning.is_finite() && self.phase.is_finite()) {
            return domain("pulse detuning and phase must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEvolution {
    /// δ, rad/s.
    pub detuning: f64,
    /// T, s.
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    Pulse(RamanPulse),
    Wait(FreeEvolution),
}

/// Ordered segments; the first one acts first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    segments: Vec<Segment>,
}

const UP: usize = 3; // |1⟩
const DOWN: usize = 1; // |−1⟩

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Embeds a 2×2 block on `(|1⟩, |−1⟩)` into the five-level space.
fn embed(block: [[Complex64; 2]; 2]) -> AtomOp {
    let mut u = AtomOp::identity();
    let idx = [UP, DOWN];
    for i in 0..2 {
        for j in 0..2 {
            u[(idx[i], idx[j])] = block[i][j];
        }
    }
    u
}

/// Single-atom propagator of one Raman pulse.
pub fn raman_unitary(pulse: &RamanPulse) -> Result<AtomOp> {
    pulse.validate()?;
    let RamanPulse { rabi_rate: omega, detuning: delta, duration: tau, phase } = *pulse;
    let general = omega.hypot(delta);
    if general == 0.0 || tau == 0.0 {
        return Ok(AtomOp::identity());
    }
    let half = 0.5 * general * tau;
    let (s, cs) = half.sin_cos();
    let nx = omega / general * phase.cos();
    let ny = omega / general * phase.sin();
    let nz = -delta / general;
    // cos·I + i sin·(nx X + ny Y + nz Z)
    let block = [
        [c(cs, s * nz), c(s * ny, s * nx)],
        [c(-s * ny, s * nx), c(cs, -s * nz)],
    ];
    Ok(embed(block))
}

/// Single-atom propagator of free precession at detuning `δ` for `T`.
pub fn free_evolution_unitary(seg: &FreeEvolution) -> Result<AtomOp> {
    if !(seg.duration.is_finite() && seg.duration >= 0.0) {
        return domain(format!("wait duration {} must be nonnegative", seg.duration));
    }
    if !seg.detuning.is_finite() {
        return domain("wait detuning must be finite");
    }
    let half = 0.5 * seg.detuning * seg.duration;
    let zero = c(0.0, 0.0);
    Ok(embed([
        [Complex64::from_polar(1.0, -half), zero],
        [zero, Complex64::from_polar(1.0, half)],
    ]))
}

impl PulseSequence {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return domain("pulse sequence is empty");
        }
        Ok(PulseSequence { segments })
    }

    pub fn single(pulse: RamanPulse) -> Self {
        PulseSequence { segments: vec![Segment::Pulse(pulse)] }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Total single-atom propagator `U_n ⋯ U_1`.
    pub fn unitary(&self, mode: PulseMode) -> Result<AtomOp> {
        let mut u = AtomOp::identity();
        for seg in &self.segments {
            let step = match seg {
                Segment::Pulse(p) => {
                    let p = match mode {
                        PulseMode::Ideal => RamanPulse { detuning: 0.0, ..*p },
                        PulseMode::Full => *p,
                    };
                    raman_unitary(&p)?
                }
                Segment::Wait(w) => free_evolution_unitary(w)?,
            };
            u = step * u;
        }
        Ok(u)
    }
}

/// `(U⊗U) ρ (U⊗U)†`; both atoms see the same drive, collisions are frozen.
pub fn apply_sequence(
    rho: &DensityMatrix,
    seq: &PulseSequence,
    mode: PulseMode,
) -> Result<DensityMatrix> {
    if seq.segments.is_empty() {
        return domain("pulse sequence is empty");
    }
    let u = seq.unitary(mode)?;
    Ok(apply_pair_unitary(rho, &u))
}

pub(crate) fn apply_pair_unitary(rho: &DensityMatrix, u: &AtomOp) -> DensityMatrix {
    let w = kron(u, u);
    DensityMatrix::from_matrix_unchecked(w * rho.matrix() * w.adjoint())
}

/// Level populations of one atom that starts in `start` and sees `seq`.
pub fn single_atom_populations(
    start: SpinLevel,
    seq: &PulseSequence,
    mode: PulseMode,
) -> Result<[f64; 5]> {
    let u = seq.unitary(mode)?;
    let col = u.column(start.index());
    Ok(std::array::from_fn(|i| col[i].norm_sqr()))
}

/// π/2 – wait – π/2 with both pulses at phase 0.
///
/// Pulse duration is `pulse_area / omega` (resonant area); the detuning is
/// carried inside the pulses and applied there in [`PulseMode::Full`].
pub fn ramsey_sequence(omega: f64, delta: f64, wait: f64, pulse_area: f64) -> Result<PulseSequence> {
    if !(omega.is_finite() && omega > 0.0) {
        return domain(format!("Ramsey Rabi rate {omega} must be positive"));
    }
    if !(pulse_area.is_finite() && pulse_area >= 0.0) {
        return domain(format!("pulse area {pulse_area} must be nonnegative"));
    }
    let pulse = RamanPulse {
        rabi_rate: omega,
        detuning: delta,
        duration: pulse_area / omega,
        phase: 0.0,
    };
    PulseSequence::new(vec![
        Segment::Pulse(pulse),
        Segment::Wait(FreeEvolution { detuning: delta, duration: wait }),
        Segment::Pulse(pulse),
    ])
}

/// Default Ramsey pulse area, π/2.
pub const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
