use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::CountData;
use crate::error::{domain, Error, Result};
use crate::par;

const PRESCAN_POINTS: usize = 4000;
const MAX_REFINE_ITERATIONS: usize = 300;

/// Least-squares fringe `offset + contrast·cos(2π·frequency·x + phase)`.
///
/// `frequency` is in cycles per unit of `x` (1/kHz for detuning scans), so
/// `spacing = 1/frequency` is the fringe period in units of `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub offset: f64,
    pub contrast: f64,
    pub frequency: f64,
    pub phase: f64,
    pub spacing: f64,
    /// Residual sum of squares.
    pub residual: f64,
    pub iterations: usize,
    /// False when the data carry no usable oscillation.
    pub identifiable: bool,
    pub diagnostics: Vec<String>,
}

struct Linear {
    offset: f64,
    a: f64,
    b: f64,
    rss: f64,
}

/// Best offset and quadratures at a fixed frequency.
fn solve_linear(x: &[f64], y: &[f64], freq: f64) -> Linear {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        let (s, c) = (2.0 * PI * freq * xi).sin_cos();
        let row = Vector3::new(1.0, c, s);
        ata += row * row.transpose();
        aty += row * yi;
    }
    let coef = ata.lu().solve(&aty).filter(|v| v.iter().all(|c| c.is_finite()));
    let coef = match coef {
        Some(c) => c,
        None => {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            Vector3::new(mean, 0.0, 0.0)
        }
    };
    let rss = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let (s, c) = (2.0 * PI * freq * xi).sin_cos();
            let r = yi - coef[0] - coef[1] * c - coef[2] * s;
            r * r
        })
        .sum();
    Linear { offset: coef[0], a: coef[1], b: coef[2], rss }
}

/// Fits a sinusoid with offset to `(x, y)`.
///
/// A dense frequency pre-scan (plus a fine scan around `guess` when it is
/// positive) picks the basin, then golden-section search refines it.
pub fn fit_sinusoid(x: &[f64], y: &[f64], guess: Option<f64>) -> Result<FringeFit> {
    if x.len() != y.len() {
        return domain("x and y lengths differ");
    }
    if x.len() < 8 {
        return domain(format!("fringe fit needs at least 8 points, got {}", x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return domain("fringe data contain non-finite values");
    }
    let span = x.iter().cloned().fold(f64::MIN, f64::max) - x.iter().cloned().fold(f64::MAX, f64::min);
    if span <= 0.0 {
        return domain("fringe data span no range in x");
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).filter(|g| *g > 0.0).collect();
    gaps.sort_by(f64::total_cmp);
    let median_gap = gaps[gaps.len() / 2];
    let f_min = 0.5 / span;
    let f_max = 0.5 / median_gap;

    let mut candidates: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|i| f_min + (f_max - f_min) * i as f64 / (PRESCAN_POINTS - 1) as f64)
        .collect();
    let coarse_step = (f_max - f_min) / (PRESCAN_POINTS - 1) as f64;
    if let Some(g) = guess.filter(|g| g.is_finite() && *g > 0.0) {
        candidates.extend((0..=200).map(|i| g * (0.9 + 0.2 * i as f64 / 200.0)));
    }
    let rss = par::map(&candidates, |&f| solve_linear(x, y, f).rss);
    let (best_idx, _) = rss
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("candidates nonempty");
    let f0 = candidates[best_idx];
    let half_width = if best_idx < PRESCAN_POINTS { coarse_step } else { 0.001 * f0 };

    // golden-section refinement
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((f0 - half_width).max(0.5 * f_min), f0 + half_width);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = solve_linear(x, y, c).rss;
    let mut fd = solve_linear(x, y, d).rss;
    let mut iterations = 0;
    while (b - a) > 1e-14 * b.abs().max(1e-300) {
        if iterations >= MAX_REFINE_ITERATIONS || !fc.is_finite() || !fd.is_finite() {
            return Err(Error::Fit(format!(
                "frequency refinement did not converge after {iterations} iterations: \
                 bracket [{a:e}, {b:e}], rss {fc:e}/{fd:e}"
            )));
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = solve_linear(x, y, c).rss;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = solve_linear(x, y, d).rss;
        }
        iterations += 1;
    }
    let frequency = 0.5 * (a + b);
    let lin = solve_linear(x, y, frequency);
    let contrast = lin.a.hypot(lin.b);
    let mut diagnostics = Vec::new();
    let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let identifiable = contrast > 1e-9 * scale.max(1e-12);
    if !identifiable {
        diagnostics.push(format!(
            "contrast {contrast:e} is negligible: frequency is unidentifiable"
        ));
    }
    if frequency * span < 1.0 {
        diagnostics.push(format!(
            "data span {:.3} fringe periods; at least one is needed",
            frequency * span
        ));
    }
    if (frequency - f_max).abs() < coarse_step || (frequency - f_min).abs() < coarse_step {
        diagnostics.push("best frequency sits at the edge of the searchable band".into());
    }
    Ok(FringeFit {
        offset: lin.offset,
        contrast,
        frequency,
        phase: (-lin.b).atan2(lin.a),
        spacing: 1.0 / frequency,
        residual: lin.rss,
        iterations,
        identifiable,
        diagnostics,
    })
}

/// Fits the observed fraction in `channel` along the scan grid.
pub fn fit_fringe(data: &CountData, channel: usize, guess: Option<f64>) -> Result<FringeFit> {
    if channel > 2 {
        return domain(format!("channel {channel} is not one of 0, 1, 2"));
    }
    fit_sinusoid(&data.x, &data.fractions(channel), guess)
}
