use num_complex::Complex64;

use super::{DensityMatrix, PairOp, PAIR_DIM};
use crate::error::{domain, Result};
use crate::spin::state::pair_levels;

/// Sign pattern of the Kraus flip: −1 on `|m,−m⟩` with `m > 0`, +1 elsewhere.
fn flip_sign(index: usize) -> f64 {
    let (a, b) = pair_levels(index);
    if a.m() > 0 && a.m() + b.m() == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Kraus operators `{√(1−λ/2)·I, √(λ/2)·Z_P}` of the parity-dephasing channel.
pub fn parity_dephasing_kraus(lambda: f64) -> Result<[PairOp; 2]> {
    check_lambda(lambda)?;
    let keep = PairOp::identity() * Complex64::new((1.0 - 0.5 * lambda).sqrt(), 0.0);
    let mut flip = PairOp::zeros();
    let s = (0.5 * lambda).sqrt();
    for i in 0..PAIR_DIM {
        flip[(i, i)] = Complex64::new(s * flip_sign(i), 0.0);
    }
    Ok([keep, flip])
}

/// Damps the `|m,−m⟩ ↔ |−m,m⟩` coherences by `1 − λ`, keeping populations.
///
/// At `λ = 1` the symmetric state `|χ₁⟩` becomes the equal mixture of
/// `|χ₁⟩` and `|χ₋⟩`.
pub fn parity_dephasing(rho: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
    check_lambda(lambda)?;
    let mut m = *rho.matrix();
    for i in 0..PAIR_DIM {
        let si = flip_sign(i);
        for j in 0..PAIR_DIM {
            if si != flip_sign(j) {
                m[(i, j)] *= 1.0 - lambda;
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        domain(format!("dephasing strength {lambda} outside [0, 1]"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::state::correlated_mixture;
    use crate::spin::{concurrence_pm1, symmetric_pair_state, SpinLevel};
    use approx::assert_abs_diff_eq;

    #[test]
    fn kraus_completeness() {
        for k in 0..=20 {
            let lambda = k as f64 / 20.0;
            let ops = parity_dephasing_kraus(lambda).unwrap();
            let sum: PairOp = ops.iter().map(|k| k.adjoint() * k).sum();
            assert!((sum - PairOp::identity()).camax() < 1e-12);
        }
    }

    #[test]
    fn kraus_form_matches_elementwise_map() {
        let chi2 = symmetric_pair_state(2, 1).unwrap().projector();
        let chi1 = symmetric_pair_state(1, 1).unwrap().projector();
        let rho = DensityMatrix::from_matrix_unchecked(
            (chi1.matrix() * Complex64::new(0.7, 0.0)) + (chi2.matrix() * Complex64::new(0.3, 0.0)),
        );
        let lambda = 0.35;
        let ops = parity_dephasing_kraus(lambda).unwrap();
        let via_kraus: PairOp = ops.iter().map(|k| k * rho.matrix() * k.adjoint()).sum();
        let direct = parity_dephasing(&rho, lambda).unwrap();
        assert!((via_kraus - direct.matrix()).camax() < 1e-14);
    }

    #[test]
    fn identity_at_zero_strength() {
        let chi1 = symmetric_pair_state(1, 1).unwrap().projector();
        assert_eq!(parity_dephasing(&chi1, 0.0).unwrap(), chi1);
    }

    #[test]
    fn full_strength_destroys_entanglement() {
        let chi1 = symmetric_pair_state(1, 1).unwrap().projector();
        let out = parity_dephasing(&chi1, 1.0).unwrap();
        assert!((out.matrix() - correlated_mixture().matrix()).camax() < 1e-15);
    }

    #[test]
    fn half_strength() {
        let chi1 = symmetric_pair_state(1, 1).unwrap().projector();
        let out = parity_dephasing(&chi1, 0.5).unwrap();
        let (p, m) = (SpinLevel::PLUS_ONE, SpinLevel::MINUS_ONE);
        assert_abs_diff_eq!(out.entry((p, m), (m, p)).re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(concurrence_pm1(&out).unwrap(), 0.5, epsilon = 1e-12);
        out.check().unwrap();
    }

    #[test]
    fn rejects_out_of_range_strength() {
        let chi1 = symmetric_pair_state(1, 1).unwrap().projector();
        assert!(parity_dephasing(&chi1, -0.1).is_err());
        assert!(parity_dephasing(&chi1, 1.01).is_err());
        assert!(parity_dephasing_kraus(f64::NAN).is_err());
    }
}
