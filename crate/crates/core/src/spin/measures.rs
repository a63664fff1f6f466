use nalgebra::Matrix4;
use num_complex::Complex64;

use super::{basis_index, DensityMatrix, SpinLevel, LEVELS};
use crate::error::{Error, Result};

/// Weight of the exchange-symmetric subspace, `Tr(P_sym ρ P_sym)`.
///
/// With `P_sym = (I + SWAP)/2` this is `(1 + Tr(SWAP ρ))/2`.
pub fn exchange_symmetric_weight(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let mut swap_trace = 0.0;
    for a in 0..LEVELS {
        for b in 0..LEVELS {
            swap_trace += m[(LEVELS * b + a, LEVELS * a + b)].re;
        }
    }
    (0.5 * (1.0 + swap_trace)).clamp(0.0, 1.0)
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// Uses the Hermitian form `R = √(√ρ ρ̃ √ρ)`, whose eigenvalues are the
/// square roots of the eigenvalues of `ρρ̃`.
pub fn wootters_concurrence(rho: &Matrix4<Complex64>) -> f64 {
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let sqrt_rho =
        eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();

    // σy⊗σy is real: antidiag(-1, 1, 1, -1)
    let mut yy = Matrix4::<Complex64>::zeros();
    yy[(0, 3)] = Complex64::new(-1.0, 0.0);
    yy[(1, 2)] = Complex64::new(1.0, 0.0);
    yy[(2, 1)] = Complex64::new(1.0, 0.0);
    yy[(3, 0)] = Complex64::new(-1.0, 0.0);
    let flipped = yy * herm.map(|z| z.conj()) * yy;

    let m = sqrt_rho * flipped * sqrt_rho;
    let m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = m
        .symmetric_eigenvalues()
        .iter()
        .map(|&mu| mu.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Indices of the `{|1⟩,|−1⟩}⊗{|1⟩,|−1⟩}` block; `|1⟩` plays qubit state 0.
pub(crate) fn pm1_block_indices() -> [usize; 4] {
    let up = SpinLevel::PLUS_ONE;
    let dn = SpinLevel::MINUS_ONE;
    [
        basis_index(up, up),
        basis_index(up, dn),
        basis_index(dn, up),
        basis_index(dn, dn),
    ]
}

/// Concurrence of the renormalized `±1` block of `rho`.
pub fn concurrence_pm1(rho: &DensityMatrix) -> Result<f64> {
    let idx = pm1_block_indices();
    let m = rho.matrix();
    let block = Matrix4::from_fn(|i, j| m[(idx[i], idx[j])]);
    let tr = block.trace().re;
    if !(tr > 1e-14) {
        return Err(Error::Undefined(format!(
            "the ±1 block has trace {tr:e}; concurrence is undefined"
        )));
    }
    Ok(wootters_concurrence(&(block / Complex64::new(tr, 0.0))).min(1.0))
}
