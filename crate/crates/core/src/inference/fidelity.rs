use serde::{Deserialize, Serialize};

use super::model::validate_grid;
use super::{chi_squared, model_curves, CountData, ScanSpec};
use crate::detection::{DetectionParams, OutcomeDistribution};
use crate::error::{domain, Error, Result};
use crate::par;
use crate::relaxation::RateConfig;

/// Only the two-atom channel enters the fidelity fit: it is blind to the
/// inelastic-loss model.
const FIT_CHANNEL: usize = 2;

/// Result of a χ² scan over the coherence fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub best_f: f64,
    pub chi2_min: f64,
    pub dof: i64,
    /// Edges of the Δχ² ≤ 1 region around `best_f`, on the grid.
    pub lower: f64,
    pub upper: f64,
    /// `[lower, upper]` clipped to the physical range `[0, 1]`.
    pub physical_lower: f64,
    pub physical_upper: f64,
    pub f_grid: Vec<f64>,
    pub chi2: Vec<f64>,
}

impl FidelityEstimate {
    pub fn contains(&self, f: f64) -> bool {
        self.lower - 1e-12 <= f && f <= self.upper + 1e-12
    }
}

/// Model curves precomputed on an f grid, reusable across data sets.
///
/// The readout probabilities are affine in `f`, so grid values outside
/// `[0, 1]` use the affine continuation of the model through its values at
/// 0 and 1. Inside `[0, 1]` the model is evaluated directly.
#[derive(Debug, Clone)]
pub struct FidelityModel {
    grid: Vec<f64>,
    f_grid: Vec<f64>,
    curves: Vec<Vec<OutcomeDistribution>>,
}

impl FidelityModel {
    pub fn new(
        spec: &ScanSpec,
        rates: &RateConfig,
        det: &DetectionParams,
        f_grid: &[f64],
    ) -> Result<Self> {
        validate_grid(f_grid)?;
        let (lo, hi) = (f_grid[0], f_grid[f_grid.len() - 1]);
        if lo > 1e-9 || hi < 1.0 - 1e-9 {
            return domain(format!("f grid [{lo}, {hi}] does not cover [0, 1]"));
        }
        let at_zero = model_curves(spec, rates, det, 0.0)?;
        let at_one = model_curves(spec, rates, det, 1.0)?;
        let curves = par::try_map(f_grid, |&f| {
            if (0.0..=1.0).contains(&f) {
                model_curves(spec, rates, det, f)
            } else {
                Ok(affine(&at_zero, &at_one, f))
            }
        })?;
        Ok(FidelityModel {
            grid: spec.grid.clone(),
            f_grid: f_grid.to_vec(),
            curves,
        })
    }

    pub fn f_grid(&self) -> &[f64] {
        &self.f_grid
    }

    pub fn curves(&self, k: usize) -> &[OutcomeDistribution] {
        &self.curves[k]
    }

    pub fn fit(&self, data: &CountData) -> Result<FidelityEstimate> {
        if data.is_empty() {
            return domain("no data points");
        }
        if data.len() != self.grid.len()
            || data
                .x
                .iter()
                .zip(&self.grid)
                .any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + b.abs()))
        {
            return domain("data grid does not match the scan grid");
        }
        let profile = par::try_map(&self.curves, |c| chi_squared(data, c, &[FIT_CHANNEL], 1))?;
        let chi2: Vec<f64> = profile.iter().map(|c| c.value).collect();
        let dof = profile[0].dof;

        let (best, &chi2_min) = chi2
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("f grid is nonempty");
        if !chi2_min.is_finite() {
            return Err(Error::Fit(
                "χ² is infinite for every f: the data contain outcomes the model forbids".into(),
            ));
        }
        let limit = chi2_min + 1.0;
        let mut lo = best;
        while lo > 0 && chi2[lo - 1] <= limit {
            lo -= 1;
        }
        let mut hi = best;
        while hi + 1 < chi2.len() && chi2[hi + 1] <= limit {
            hi += 1;
        }
        let (lower, upper) = (self.f_grid[lo], self.f_grid[hi]);
        Ok(FidelityEstimate {
            best_f: self.f_grid[best],
            chi2_min,
            dof,
            lower,
            upper,
            physical_lower: lower.clamp(0.0, 1.0),
            physical_upper: upper.clamp(0.0, 1.0),
            f_grid: self.f_grid.clone(),
            chi2,
        })
    }
}

fn affine(
    at_zero: &[OutcomeDistribution],
    at_one: &[OutcomeDistribution],
    f: f64,
) -> Vec<OutcomeDistribution> {
    let mix = |a: f64, b: f64| a + f * (b - a);
    at_zero
        .iter()
        .zip(at_one)
        .map(|(a, b)| OutcomeDistribution {
            p0: mix(a.p0, b.p0),
            p1: mix(a.p1, b.p1),
            p2: mix(a.p2, b.p2),
        })
        .collect()
}

/// Scans `f_grid`, minimizing χ² of the two-atom channel; the 68 % interval
/// is `{f : χ²(f) ≤ χ²_min + 1}`.
pub fn fit_fidelity(
    data: &CountData,
    spec: &ScanSpec,
    rates: &RateConfig,
    det: &DetectionParams,
    f_grid: &[f64],
) -> Result<FidelityEstimate> {
    FidelityModel::new(spec, rates, det, f_grid)?.fit(data)
}

/// `start, start + step, …, end`, snapped to 1e-12.
pub fn grid_from_range(start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && step.is_finite() && end.is_finite()) || step <= 0.0 || end < start {
        return domain(format!("invalid grid {start}:{step}:{end}"));
    }
    let n = ((end - start) / step).round();
    if (start + n * step - end).abs() > 1e-9 * step.max(1.0) || n > 1e7 {
        return domain(format!("grid {start}:{step}:{end} does not land on its end point"));
    }
    Ok((0..=n as usize)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
