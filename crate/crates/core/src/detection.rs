//! Push-out readout: from pair populations to the number of atoms left.
//!
//! Stages, in order: spontaneous-emission relabeling, `|1⟩ → F=3`
//! transfer, inelastic pair loss when exactly one atom is F=3, push-out of
//! F=3 atoms, background loss. Everything is computed by enumerating the
//! finite joint label space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, domain, Result};
use crate::par;
use crate::spin::{DensityMatrix, SpectatorDistribution, SpinLevel, LEVELS, PAIR_DIM};

/// Classical imperfections of preparation and readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionParams {
    /// Probability an F=3-labeled atom is pushed out.
    pub eject_efficiency: f64,
    /// Per-atom probability of being lost for unrelated reasons.
    pub bg_loss: f64,
    /// Per-atom spontaneous-emission probability per pulse sequence.
    pub p_se: f64,
    /// Probability a scattered atom ends up F=3-labeled.
    pub se_to_f3: f64,
    /// Pair-loss probability when exactly one atom is F=3-labeled.
    pub p_inelastic: f64,
    /// Per-atom probability of missing `|0⟩` during state preparation.
    pub prep_error: f64,
    /// Relative weights of mis-prepared levels m = −2, −1, 1, 2.
    #[serde(default = "uniform4")]
    pub spectator_levels: [f64; 4],
    /// Where a scattered atom lands among m = −2..2 when it stays in F=2.
    #[serde(default = "uniform5")]
    pub se_f2_branching: [f64; 5],
}

fn uniform4() -> [f64; 4] {
    [1.0; 4]
}

fn uniform5() -> [f64; 5] {
    [1.0; 5]
}

impl Default for DetectionParams {
    /// Shipped defaults. Only `prep_error` (93 % per-atom preparation) is an
    /// measured figure; the rest are plausible but uncalibrated, in
    /// particular `p_inelastic`.
    fn default() -> Self {
        DetectionParams {
            eject_efficiency: 0.97,
            bg_loss: 0.02,
            p_se: 0.02,
            se_to_f3: 0.5,
            p_inelastic: 0.3,
            prep_error: 0.07,
            spectator_levels: uniform4(),
            se_f2_branching: uniform5(),
        }
    }
}

impl DetectionParams {
    /// Perfect push-out, no other imperfection.
    pub fn ideal() -> Self {
        DetectionParams {
            eject_efficiency: 1.0,
            bg_loss: 0.0,
            p_se: 0.0,
            se_to_f3: 0.0,
            p_inelastic: 0.0,
            prep_error: 0.0,
            spectator_levels: uniform4(),
            se_f2_branching: uniform5(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("eject_efficiency", self.eject_efficiency)?;
        check_probability("bg_loss", self.bg_loss)?;
        check_probability("p_se", self.p_se)?;
        check_probability("se_to_f3", self.se_to_f3)?;
        check_probability("p_inelastic", self.p_inelastic)?;
        check_probability("prep_error", self.prep_error)?;
        check_weights("spectator_levels", &self.spectator_levels)?;
        check_weights("se_f2_branching", &self.se_f2_branching)?;
        Ok(())
    }

    pub fn spectator_distribution(&self) -> Result<SpectatorDistribution> {
        SpectatorDistribution::from_preparation(self.prep_error, self.spectator_levels)
    }
}

fn check_weights(name: &str, w: &[f64]) -> Result<()> {
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
        return domain(format!("{name} must be nonnegative with a positive sum"));
    }
    Ok(())
}

/// Probabilities of 0, 1 or 2 atoms remaining.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl OutcomeDistribution {
    pub fn as_array(&self) -> [f64; 3] {
        [self.p0, self.p1, self.p2]
    }

    pub fn channel(&self, n: usize) -> f64 {
        self.as_array()[n]
    }

    pub fn sum(&self) -> f64 {
        self.p0 + self.p1 + self.p2
    }

    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        0.5 * self
            .as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Observed numbers of shots with 0, 1 or 2 atoms remaining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub n0: u64,
    pub n1: u64,
    pub n2: u64,
}

impl OutcomeCounts {
    pub fn shots(&self) -> u64 {
        self.n0 + self.n1 + self.n2
    }

    pub fn as_array(&self) -> [u64; 3] {
        [self.n0, self.n1, self.n2]
    }

    pub fn frequencies(&self) -> OutcomeDistribution {
        let n = self.shots() as f64;
        OutcomeDistribution {
            p0: self.n0 as f64 / n,
            p1: self.n1 as f64 / n,
            p2: self.n2 as f64 / n,
        }
    }
}

/// Population-basis readout: the diagonal of `rho`, indexed like the pair basis.
pub fn joint_level_distribution(rho: &DensityMatrix) -> [f64; PAIR_DIM] {
    rho.diagonal().map(|p| p.max(0.0))
}

const F3: usize = LEVELS;
const LABELS: usize = LEVELS + 1;

/// `T[label][level]`: per-atom relabeling by spontaneous emission.
fn emission_matrix(params: &DetectionParams) -> [[f64; LEVELS]; LABELS] {
    let total: f64 = params.se_f2_branching.iter().sum();
    let mut t = [[0.0; LEVELS]; LABELS];
    for level in 0..LEVELS {
        t[level][level] += 1.0 - params.p_se;
        t[F3][level] += params.p_se * params.se_to_f3;
        for (k, w) in params.se_f2_branching.iter().enumerate() {
            t[k][level] += params.p_se * (1.0 - params.se_to_f3) * w / total;
        }
    }
    t
}

fn is_f3(label: usize) -> bool {
    label == F3 || label == SpinLevel::PLUS_ONE.index()
}

fn survival(params: &DetectionParams, f3: bool) -> f64 {
    let keep = 1.0 - params.bg_loss;
    if f3 {
        (1.0 - params.eject_efficiency) * keep
    } else {
        keep
    }
}

/// Exact 0/1/2 distribution after the full detection pipeline.
pub fn outcome_distribution(
    rho: &DensityMatrix,
    params: &DetectionParams,
) -> Result<OutcomeDistribution> {
    params.validate()?;
    let joint = joint_level_distribution(rho);
    let t = emission_matrix(params);

    // collapse each atom to "F=3-labeled or not" after stages 1 and 2
    let mut per_atom_f3 = [[0.0; LEVELS]; 2];
    for level in 0..LEVELS {
        for (label, row) in t.iter().enumerate() {
            per_atom_f3[is_f3(label) as usize][level] += row[level];
        }
    }
    let mut flags = [[0.0; 2]; 2];
    for (i, &p) in joint.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let (l1, l2) = (i / LEVELS, i % LEVELS);
        for a in 0..2 {
            for b in 0..2 {
                flags[a][b] += p * per_atom_f3[a][l1] * per_atom_f3[b][l2];
            }
        }
    }

    let mut out = [0.0; 3];
    for a in 0..2 {
        for b in 0..2 {
            let p = flags[a][b];
            let mut cont = p;
            if a + b == 1 {
                out[0] += p * params.p_inelastic;
                cont *= 1.0 - params.p_inelastic;
            }
            let s1 = survival(params, a == 1);
            let s2 = survival(params, b == 1);
            out[2] += cont * s1 * s2;
            out[1] += cont * (s1 * (1.0 - s2) + (1.0 - s1) * s2);
            out[0] += cont * (1.0 - s1) * (1.0 - s2);
        }
    }
    Ok(normalized(out))
}

/// Readout of a lone atom with the given level populations (`p2` is 0).
pub fn single_atom_outcome(
    populations: &[f64; LEVELS],
    params: &DetectionParams,
) -> Result<OutcomeDistribution> {
    params.validate()?;
    let t = emission_matrix(params);
    let mut out = [0.0; 3];
    for (level, &p) in populations.iter().enumerate() {
        for (label, row) in t.iter().enumerate() {
            let s = survival(params, is_f3(label));
            out[1] += p * row[level] * s;
            out[0] += p * row[level] * (1.0 - s);
        }
    }
    Ok(normalized(out))
}

fn normalized(out: [f64; 3]) -> OutcomeDistribution {
    let s: f64 = out.iter().sum();
    OutcomeDistribution {
        p0: out[0] / s,
        p1: out[1] / s,
        p2: out[2] / s,
    }
}

/// Shots drawn per independent RNG stream.
const SHOTS_PER_STREAM: u64 = 8192;

/// Multinomial draw of `shots` readouts from `dist`.
///
/// Shots are split into fixed-size blocks, block `k` using the ChaCha8
/// stream `k` of `seed`; the counts do not depend on thread count.
pub fn sample_counts(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Result<OutcomeCounts> {
    if shots == 0 {
        return domain("shots must be at least 1");
    }
    let p = dist.as_array();
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) || (dist.sum() - 1.0).abs() > 1e-9 {
        return domain("outcome distribution is not normalized");
    }
    let blocks = shots.div_ceil(SHOTS_PER_STREAM);
    let cut0 = p[0];
    let cut1 = p[0] + p[1];
    let partial = par::map_range(blocks as usize, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let n = SHOTS_PER_STREAM.min(shots - k as u64 * SHOTS_PER_STREAM);
        let mut c = OutcomeCounts::default();
        for _ in 0..n {
            let u: f64 = rng.random();
            if u < cut0 {
                c.n0 += 1;
            } else if u < cut1 {
                c.n1 += 1;
            } else {
                c.n2 += 1;
            }
        }
        c
    });
    Ok(partial.into_iter().fold(OutcomeCounts::default(), |a, b| OutcomeCounts {
        n0: a.n0 + b.n0,
        n1: a.n1 + b.n1,
        n2: a.n2 + b.n2,
    }))
}

/// Seeded synthetic readout of `rho`.
pub fn sample_outcomes(
    rho: &DensityMatrix,
    params: &DetectionParams,
    shots: u64,
    seed: u64,
) -> Result<OutcomeCounts> {
    let dist = outcome_distribution(rho, params)?;
    sample_counts(&dist, shots, seed)
}

/// Deterministic per-item seed (splitmix64 of `seed` and `index`).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
