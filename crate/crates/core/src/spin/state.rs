use nalgebra::SVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{basis_index, basis_pair, PairOp, SpinLevel, LEVELS, PAIR_DIM};
use crate::error::{check_probability, domain, Error, Result};

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;
const SUM_TOL: f64 = 1e-12;

/// Normalized pure state of the pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket(SVector<Complex64, PAIR_DIM>);

impl Ket {
    pub fn new(amplitudes: SVector<Complex64, PAIR_DIM>) -> Result<Self> {
        let n = amplitudes.norm_squared();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "ket has squared norm {n}, expected 1"
            )));
        }
        Ok(Ket(amplitudes))
    }

    /// Product basis state `|m1, m2⟩`.
    pub fn basis(m1: SpinLevel, m2: SpinLevel) -> Self {
        let mut v = SVector::zeros();
        v[basis_index(m1, m2)] = Complex64::new(1.0, 0.0);
        Ket(v)
    }

    pub fn amplitude(&self, m1: SpinLevel, m2: SpinLevel) -> Complex64 {
        self.0[basis_index(m1, m2)]
    }

    pub fn amplitudes(&self) -> &SVector<Complex64, PAIR_DIM> {
        &self.0
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix(self.0 * self.0.adjoint())
    }
}

/// Mixed state of the pair: a 25×25 Hermitian, unit-trace, PSD matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(PairOp);

impl DensityMatrix {
    /// Validates `m` against the density-operator invariants.
    pub fn new(m: PairOp) -> Result<Self> {
        let rho = DensityMatrix(m);
        rho.check()?;
        Ok(rho)
    }

    /// Wraps a matrix produced by a trace-preserving CP map of a valid state.
    pub(crate) fn from_matrix_unchecked(m: PairOp) -> Self {
        DensityMatrix(m)
    }

    pub fn pure(m1: SpinLevel, m2: SpinLevel) -> Self {
        Ket::basis(m1, m2).projector()
    }

    pub fn matrix(&self) -> &PairOp {
        &self.0
    }

    pub fn into_matrix(self) -> PairOp {
        self.0
    }

    /// `⟨a1,a2| ρ |b1,b2⟩`.
    pub fn entry(&self, a: (SpinLevel, SpinLevel), b: (SpinLevel, SpinLevel)) -> Complex64 {
        self.0[(basis_index(a.0, a.1), basis_index(b.0, b.1))]
    }

    pub fn population(&self, m1: SpinLevel, m2: SpinLevel) -> f64 {
        self.entry((m1, m2), (m1, m2)).re
    }

    /// The 25 diagonal entries in basis order.
    pub fn diagonal(&self) -> [f64; PAIR_DIM] {
        std::array::from_fn(|i| self.0[(i, i)].re)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().min()
    }

    /// Checks Hermiticity, unit trace and positivity at the crate tolerances.
    pub fn check(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if !(herm <= HERMITIAN_TOL) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max defect {herm:e})"
            )));
        }
        let tr = self.0.trace();
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if !(min >= PSD_TOL) {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:e} below {PSD_TOL:e}"
            )));
        }
        Ok(())
    }

    /// Expectation value `Tr(ρ A)`.
    pub fn expectation(&self, op: &PairOp) -> Complex64 {
        (self.0 * op).trace()
    }
}

/// `(|m,−m⟩ + sign·|−m,m⟩)/√2` for `m ∈ {1, 2}`.
pub fn symmetric_pair_state(m: i32, sign: i32) -> Result<Ket> {
    if m != 1 && m != 2 {
        return domain(format!(
            "pair superposition needs m in {{1, 2}}, got {m}"
        ));
    }
    if sign != 1 && sign != -1 {
        return domain(format!("sign must be +1 or -1, got {sign}"));
    }
    let up = SpinLevel::new(m)?;
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = SVector::zeros();
    v[basis_index(up, up.flipped())] = Complex64::new(a, 0.0);
    v[basis_index(up.flipped(), up)] = Complex64::new(sign as f64 * a, 0.0);
    Ok(Ket(v))
}

/// Classical joint distribution of mis-prepared (spectator) pairs.
///
/// Spectator pairs carry population only, never coherences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectatorDistribution {
    weights: Vec<f64>,
}

impl SpectatorDistribution {
    /// Joint weights in pair-basis order; must be nonnegative and sum to 1.
    pub fn new(weights: [f64; PAIR_DIM]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return domain("spectator weights must be finite and nonnegative");
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return domain(format!("spectator weights sum to {s}, expected 1"));
        }
        Ok(SpectatorDistribution {
            weights: weights.to_vec(),
        })
    }

    /// Pairs where at least one atom missed `|0⟩`.
    ///
    /// Each atom independently lands in `|0⟩` with probability `1 − prep_error`
    /// and otherwise in `m ∈ {−2, −1, 1, 2}` with relative weights
    /// `level_weights`. The result is the joint distribution conditioned on
    /// the pair not being `|0,0⟩`; at `prep_error = 0` the single-error limit
    /// is used.
    pub fn from_preparation(prep_error: f64, level_weights: [f64; 4]) -> Result<Self> {
        check_probability("prep_error", prep_error)?;
        if level_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return domain("spectator level weights must be finite and nonnegative");
        }
        let total: f64 = level_weights.iter().sum();
        if total <= 0.0 {
            return domain("spectator level weights must not all be zero");
        }
        let mut bad = [0.0; LEVELS];
        for (slot, w) in [0usize, 1, 3, 4].iter().zip(level_weights) {
            bad[*slot] = w / total;
        }
        let zero = SpinLevel::ZERO.index();
        let mut joint = [0.0; PAIR_DIM];
        if prep_error == 0.0 {
            for (i, &b) in bad.iter().enumerate() {
                joint[LEVELS * i + zero] += 0.5 * b;
                joint[LEVELS * zero + i] += 0.5 * b;
            }
        } else {
            let q: [f64; LEVELS] = std::array::from_fn(|i| {
                if i == zero {
                    1.0 - prep_error
                } else {
                    prep_error * bad[i]
                }
            });
            for a in 0..LEVELS {
                for b in 0..LEVELS {
                    if a != zero || b != zero {
                        joint[LEVELS * a + b] = q[a] * q[b];
                    }
                }
            }
            let s: f64 = joint.iter().sum();
            joint.iter_mut().for_each(|w| *w /= s);
        }
        SpectatorDistribution::new(joint)
    }

    pub fn uniform(prep_error: f64) -> Result<Self> {
        Self::from_preparation(prep_error, [1.0; 4])
    }

    pub fn weight(&self, m1: SpinLevel, m2: SpinLevel) -> f64 {
        self.weights[basis_index(m1, m2)]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Weights of the four components of a prepared pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureWeights {
    pub p00: f64,
    pub p_chi1: f64,
    pub p_chi2: f64,
    pub p_spectator: f64,
}

impl MixtureWeights {
    pub fn validate(&self) -> Result<()> {
        check_probability("p00", self.p00)?;
        check_probability("p_chi1", self.p_chi1)?;
        check_probability("p_chi2", self.p_chi2)?;
        check_probability("p_spectator", self.p_spectator)?;
        let s = self.p00 + self.p_chi1 + self.p_chi2 + self.p_spectator;
        if (s - 1.0).abs() > SUM_TOL {
            return domain(format!("mixture weights sum to {s}, expected 1"));
        }
        Ok(())
    }
}

/// Assembles `p00·|0,0⟩⟨0,0| + p_chi1·[f·|χ₁⟩⟨χ₁| + (1−f)·ρ_mix] + p_chi2·|χ₂⟩⟨χ₂|`
/// plus the diagonal spectator part.
pub fn spin_mixture(
    weights: MixtureWeights,
    coherence: f64,
    spectator: &SpectatorDistribution,
) -> Result<DensityMatrix> {
    weights.validate()?;
    check_probability("coherence fraction", coherence)?;
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut m = PairOp::zeros();
    let zero = SpinLevel::ZERO;
    let i00 = basis_index(zero, zero);
    m[(i00, i00)] += c(weights.p00);

    for (level, p, f) in [
        (SpinLevel::PLUS_ONE, weights.p_chi1, coherence),
        (SpinLevel::PLUS_TWO, weights.p_chi2, 1.0),
    ] {
        let a = basis_index(level, level.flipped());
        let b = basis_index(level.flipped(), level);
        m[(a, a)] += c(0.5 * p);
        m[(b, b)] += c(0.5 * p);
        m[(a, b)] += c(0.5 * p * f);
        m[(b, a)] += c(0.5 * p * f);
    }

    if weights.p_spectator > 0.0 {
        for (i, w) in spectator.weights.iter().enumerate() {
            m[(i, i)] += c(weights.p_spectator * w);
        }
    }
    Ok(DensityMatrix(m))
}

/// Perfectly correlated, unentangled mixture of `|1,−1⟩` and `|−1,1⟩`.
pub fn correlated_mixture() -> DensityMatrix {
    let half = Complex64::new(0.5, 0.0);
    let mut m = PairOp::zeros();
    for (a, b) in [
        (SpinLevel::PLUS_ONE, SpinLevel::MINUS_ONE),
        (SpinLevel::MINUS_ONE, SpinLevel::PLUS_ONE),
    ] {
        let i = basis_index(a, b);
        m[(i, i)] = half;
    }
    DensityMatrix(m)
}

pub(crate) fn pair_levels(index: usize) -> (SpinLevel, SpinLevel) {
    basis_pair(index).expect("index below PAIR_DIM")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const P1: SpinLevel = SpinLevel::PLUS_ONE;
    const M1: SpinLevel = SpinLevel::MINUS_ONE;
    const P2: SpinLevel = SpinLevel::PLUS_TWO;
    const M2: SpinLevel = SpinLevel::MINUS_TWO;

    fn none() -> SpectatorDistribution {
        SpectatorDistribution::uniform(0.0).unwrap()
    }

    #[test]
    fn chi_states_have_expected_amplitudes() {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let chi1 = symmetric_pair_state(1, 1).unwrap();
        assert_eq!(chi1.amplitude(P1, M1).re, a);
        assert_eq!(chi1.amplitude(M1, P1).re, a);
        assert_eq!(chi1.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 2);

        let chi2 = symmetric_pair_state(2, 1).unwrap();
        assert_eq!(chi2.amplitude(P2, M2).re, a);
        assert_eq!(chi2.amplitude(M2, P2).re, a);

        let minus = symmetric_pair_state(1, -1).unwrap();
        assert_eq!(minus.amplitude(P1, M1).re, a);
        assert_eq!(minus.amplitude(M1, P1).re, -a);
        assert_abs_diff_eq!(chi1.inner(&minus).norm(), 0.0);
    }

    #[test]
    fn pair_state_rejects_bad_arguments() {
        assert!(matches!(symmetric_pair_state(0, 1), Err(Error::Domain(_))));
        assert!(symmetric_pair_state(3, 1).is_err());
        assert!(symmetric_pair_state(1, 0).is_err());
    }

    #[test]
    fn mixture_extremes_purity() {
        let w = MixtureWeights { p00: 0.0, p_chi1: 1.0, p_chi2: 0.0, p_spectator: 0.0 };
        let pure = spin_mixture(w, 1.0, &none()).unwrap();
        assert_abs_diff_eq!(pure.purity(), 1.0, epsilon = 1e-14);
        assert!((pure.matrix() - symmetric_pair_state(1, 1).unwrap().projector().matrix()).camax() < 1e-15);

        let mixed = spin_mixture(w, 0.0, &none()).unwrap();
        assert_abs_diff_eq!(mixed.purity(), 0.5, epsilon = 1e-14);
        assert!((mixed.matrix() - correlated_mixture().matrix()).camax() < 1e-15);
    }

    #[test]
    fn mixture_with_offsets() {
        let w = MixtureWeights { p00: 0.45, p_chi1: 0.37, p_chi2: 0.18, p_spectator: 0.0 };
        let rho = spin_mixture(w, 1.0, &none()).unwrap();
        let z = SpinLevel::ZERO;
        assert_abs_diff_eq!(rho.population(z, z), 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.population(P1, M1), 0.185, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.population(M1, P1), 0.185, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.population(P2, M2), 0.09, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.population(M2, P2), 0.09, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry((P1, M1), (M1, P1)).re, 0.185, epsilon = 1e-15);
        rho.check().unwrap();
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        let bad_sum = MixtureWeights { p00: 0.5, p_chi1: 0.4, p_chi2: 0.0, p_spectator: 0.0 };
        assert!(matches!(spin_mixture(bad_sum, 1.0, &none()), Err(Error::Domain(_))));
        let negative = MixtureWeights { p00: 1.1, p_chi1: -0.1, p_chi2: 0.0, p_spectator: 0.0 };
        assert!(spin_mixture(negative, 1.0, &none()).is_err());
        let ok = MixtureWeights { p00: 1.0, p_chi1: 0.0, p_chi2: 0.0, p_spectator: 0.0 };
        assert!(spin_mixture(ok, 1.5, &none()).is_err());
    }

    #[test]
    fn spectator_distribution_conditions_on_error() {
        let e = 0.07;
        let d = SpectatorDistribution::uniform(e).unwrap();
        let z = SpinLevel::ZERO;
        assert_eq!(d.weight(z, z), 0.0);
        // one good and one bad atom vs both bad
        let w_single = (1.0 - e) * e / 4.0;
        let w_double = (e / 4.0) * (e / 4.0);
        let norm = 1.0 - (1.0 - e) * (1.0 - e);
        assert_abs_diff_eq!(d.weight(z, P2), w_single / norm, epsilon = 1e-15);
        assert_abs_diff_eq!(d.weight(M1, P2), w_double / norm, epsilon = 1e-15);
        let limit = SpectatorDistribution::uniform(0.0).unwrap();
        assert_abs_diff_eq!(limit.weight(z, M1), 0.125, epsilon = 1e-15);
        assert_eq!(limit.weight(M1, M1), 0.0);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(PairOp::identity()).is_err());
        let mut m = PairOp::zeros();
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
        let mut h = DensityMatrix::pure(P1, M1).into_matrix();
        h[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(DensityMatrix::new(h).is_err());
        assert!(DensityMatrix::new(DensityMatrix::pure(P1, M1).into_matrix()).is_ok());
    }
}
