//! Classical rate model of collisional relaxation among `|0,0⟩`, `|χ₁⟩`, `|χ₂⟩`.
//!
//! Only the three states allowed by total-m conservation and exchange
//! symmetry have slots; everything else is unreachable by construction.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, domain, Result};
use crate::spin::{spin_mixture, DensityMatrix, MixtureWeights, SpectatorDistribution};

/// Transition rates (1/s) between the three accessible pair states, plus the
/// coherence fraction assigned to the χ₁ population at readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub zero_to_chi1: f64,
    pub chi1_to_zero: f64,
    pub chi1_to_chi2: f64,
    pub chi2_to_chi1: f64,
    pub zero_to_chi2: f64,
    pub chi2_to_zero: f64,
    pub coherence_fraction: f64,
}

impl Default for RateConfig {
    /// Calibrated so a pair starting in `|0,0⟩` holds χ₁ with probability
    /// 0.370 after 100 ms, with populations (0.449, 0.370, 0.181).
    fn default() -> Self {
        RateConfig {
            zero_to_chi1: 8.0,
            chi1_to_zero: 4.0,
            chi1_to_chi2: 4.0,
            chi2_to_chi1: 3.0,
            zero_to_chi2: 2.0,
            chi2_to_zero: 2.0,
            coherence_fraction: 1.0,
        }
    }
}

impl RateConfig {
    /// No transitions at all.
    pub fn frozen() -> Self {
        RateConfig {
            zero_to_chi1: 0.0,
            chi1_to_zero: 0.0,
            chi1_to_chi2: 0.0,
            chi2_to_chi1: 0.0,
            zero_to_chi2: 0.0,
            chi2_to_zero: 0.0,
            coherence_fraction: 1.0,
        }
    }

    fn named_rates(&self) -> [(&'static str, f64); 6] {
        [
            ("zero_to_chi1", self.zero_to_chi1),
            ("chi1_to_zero", self.chi1_to_zero),
            ("chi1_to_chi2", self.chi1_to_chi2),
            ("chi2_to_chi1", self.chi2_to_chi1),
            ("zero_to_chi2", self.zero_to_chi2),
            ("chi2_to_zero", self.chi2_to_zero),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in self.named_rates() {
            if !(r.is_finite() && r >= 0.0) {
                return domain(format!("{name} = {r} must be a nonnegative rate"));
            }
        }
        check_probability("coherence_fraction", self.coherence_fraction)
    }
}

/// Populations of `|0,0⟩`, the χ₁ manifold and the χ₂ manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationVector {
    pub p00: f64,
    pub p_chi1: f64,
    pub p_chi2: f64,
}

impl PopulationVector {
    pub const GROUND: PopulationVector = PopulationVector { p00: 1.0, p_chi1: 0.0, p_chi2: 0.0 };

    pub fn new(p00: f64, p_chi1: f64, p_chi2: f64) -> Result<Self> {
        let p = PopulationVector { p00, p_chi1, p_chi2 };
        check_probability("p00", p00)?;
        check_probability("p_chi1", p_chi1)?;
        check_probability("p_chi2", p_chi2)?;
        let s = p.sum();
        if (s - 1.0).abs() > 1e-12 {
            return domain(format!("populations sum to {s}, expected 1"));
        }
        Ok(p)
    }

    pub fn sum(&self) -> f64 {
        self.p00 + self.p_chi1 + self.p_chi2
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.p00, self.p_chi1, self.p_chi2)
    }
}

/// Rate matrix with `Q[a][b] = rate(b → a)` and zero column sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator(Matrix3<f64>);

impl Generator {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// `exp(Q t)`.
    pub fn propagator(&self, t: f64) -> Matrix3<f64> {
        expm3(&(self.0 * t))
    }
}

pub fn build_rate_generator(config: &RateConfig) -> Result<Generator> {
    config.validate()?;
    let mut q = Matrix3::zeros();
    // order: 0 = |0,0⟩, 1 = χ₁, 2 = χ₂
    q[(1, 0)] = config.zero_to_chi1;
    q[(0, 1)] = config.chi1_to_zero;
    q[(2, 1)] = config.chi1_to_chi2;
    q[(1, 2)] = config.chi2_to_chi1;
    q[(2, 0)] = config.zero_to_chi2;
    q[(0, 2)] = config.chi2_to_zero;
    for c in 0..3 {
        let out: f64 = (0..3).filter(|&r| r != c).map(|r| q[(r, c)]).sum();
        q[(c, c)] = -out;
    }
    Ok(Generator(q))
}

/// `p(t) = exp(Q t) p0`.
pub fn evolve_populations(p0: PopulationVector, q: &Generator, t: f64) -> Result<PopulationVector> {
    if !(t.is_finite() && t >= 0.0) {
        return domain(format!("evolution time {t} must be nonnegative"));
    }
    let p = q.propagator(t) * p0.as_vector();
    // exp(Qt) is stochastic; clip rounding-level excursions only
    let clip = |x: f64| {
        if (-1e-12..0.0).contains(&x) {
            0.0
        } else if x > 1.0 && x < 1.0 + 1e-12 {
            1.0
        } else {
            x
        }
    };
    Ok(PopulationVector {
        p00: clip(p[0]),
        p_chi1: clip(p[1]),
        p_chi2: clip(p[2]),
    })
}

/// Pair state after holding `|0,0⟩` for `t_hold` and mixing in spectator pairs.
///
/// A fraction `1 − (1 − prep_error)²` of pairs had at least one atom
/// mis-prepared; those are drawn from `spectator` and do not relax.
pub fn prepared_state(
    config: &RateConfig,
    t_hold: f64,
    prep_error: f64,
    spectator: &SpectatorDistribution,
) -> Result<DensityMatrix> {
    check_probability("prep_error", prep_error)?;
    let q = build_rate_generator(config)?;
    let p = evolve_populations(PopulationVector::GROUND, &q, t_hold)?;
    let good = (1.0 - prep_error) * (1.0 - prep_error);
    let weights = MixtureWeights {
        p00: good * p.p00,
        p_chi1: good * p.p_chi1,
        p_chi2: good * p.p_chi2,
        p_spectator: 1.0 - good,
    };
    spin_mixture(weights, config.coherence_fraction, spectator)
}

/// `exp(Q t)` for a rate generator by scaling and squaring of a truncated
/// Taylor series.
///
/// Every intermediate power is column-stochastic, so columns are
/// renormalized after each squaring; otherwise rounding in the ~20 squarings
/// of a stiff generator drifts the probability sum by ~1e-11.
fn expm3(a: &Matrix3<f64>) -> Matrix3<f64> {
    let norm = (0..3)
        .map(|c| a.column(c).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings as i32);
    let mut term = Matrix3::identity();
    let mut sum = Matrix3::identity();
    for k in 1..=18 {
        term = term * scaled / k as f64;
        sum += term;
    }
    normalize_columns(&mut sum);
    for _ in 0..squarings {
        sum = sum * sum;
        normalize_columns(&mut sum);
    }
    sum
}

fn normalize_columns(m: &mut Matrix3<f64>) {
    for mut col in m.column_iter_mut() {
        let s: f64 = col.sum();
        col /= s;
    }
}
