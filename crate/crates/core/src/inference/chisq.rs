use serde::{Deserialize, Serialize};

use super::CountData;
use crate::detection::OutcomeDistribution;
use crate::error::{domain, Result};

/// Pearson χ² with binomial variance per channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquared {
    /// `f64::INFINITY` when the model forbids an observed outcome.
    pub value: f64,
    pub dof: i64,
}

impl ChiSquared {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    pub fn reduced(&self) -> f64 {
        self.value / self.dof as f64
    }
}

/// `Σ (n_obs − N·P)² / (N·P·(1 − P))` over points and `channels`.
///
/// `fitted` is subtracted from the number of terms to give the degrees of
/// freedom. A term whose model variance vanishes contributes 0 when the
/// observation matches exactly and `+∞` otherwise.
pub fn chi_squared(
    data: &CountData,
    model: &[OutcomeDistribution],
    channels: &[usize],
    fitted: usize,
) -> Result<ChiSquared> {
    if data.len() != model.len() {
        return domain(format!(
            "data has {} points but model has {}",
            data.len(),
            model.len()
        ));
    }
    if channels.is_empty() {
        return domain("no channels selected");
    }
    if let Some(c) = channels.iter().find(|&&c| c > 2) {
        return domain(format!("channel {c} is not one of 0, 1, 2"));
    }
    let mut value = 0.0;
    for (counts, dist) in data.counts.iter().zip(model) {
        let shots = counts.shots() as f64;
        for &ch in channels {
            let p = dist.channel(ch);
            let observed = counts.as_array()[ch] as f64;
            let expected = shots * p;
            let variance = expected * (1.0 - p);
            let resid = observed - expected;
            value += if variance > 0.0 {
                resid * resid / variance
            } else if resid.abs() <= 1e-9 * shots {
                0.0
            } else {
                f64::INFINITY
            };
        }
    }
    let dof = (data.len() * channels.len()) as i64 - fitted as i64;
    Ok(ChiSquared { value, dof })
}
