//! Two-atom spin space of the F=2 ground manifold.
//!
//! Single-atom levels are indexed `m + 2`, pair states `5·(m1+2) + (m2+2)`.

mod channel;
mod context;
mod measures;
mod state;

pub use channel::{parity_dephasing, parity_dephasing_kraus};
pub use context::ExperimentContext;
pub use measures::{concurrence_pm1, exchange_symmetric_weight, wootters_concurrence};
pub use state::{
    correlated_mixture,
    spin_mixture, symmetric_pair_state, DensityMatrix, Ket, MixtureWeights, SpectatorDistribution,
};

use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Number of Zeeman levels per atom.
pub const LEVELS: usize = 5;
/// Dimension of the two-atom spin space.
pub const PAIR_DIM: usize = LEVELS * LEVELS;

/// Operator on one atom's five levels.
pub type AtomOp = SMatrix<Complex64, LEVELS, LEVELS>;
/// Operator on the 25-dimensional pair space.
pub type PairOp = SMatrix<Complex64, PAIR_DIM, PAIR_DIM>;

/// Zeeman projection `m` of an F=2 ground-state level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct SpinLevel(i8);

impl SpinLevel {
    pub const MINUS_TWO: SpinLevel = SpinLevel(-2);
    pub const MINUS_ONE: SpinLevel = SpinLevel(-1);
    pub const ZERO: SpinLevel = SpinLevel(0);
    pub const PLUS_ONE: SpinLevel = SpinLevel(1);
    pub const PLUS_TWO: SpinLevel = SpinLevel(2);

    /// All levels in index order.
    pub const ALL: [SpinLevel; LEVELS] = [
        Self::MINUS_TWO,
        Self::MINUS_ONE,
        Self::ZERO,
        Self::PLUS_ONE,
        Self::PLUS_TWO,
    ];

    pub fn new(m: i32) -> Result<Self> {
        if (-2..=2).contains(&m) {
            Ok(SpinLevel(m as i8))
        } else {
            domain(format!("Zeeman projection m = {m} outside [-2, 2]"))
        }
    }

    pub fn m(self) -> i32 {
        self.0 as i32
    }

    /// Position of this level in single-atom vectors.
    pub fn index(self) -> usize {
        (self.0 + 2) as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        if i < LEVELS {
            Ok(Self::ALL[i])
        } else {
            domain(format!("single-atom index {i} outside [0, 4]"))
        }
    }

    pub fn flipped(self) -> Self {
        SpinLevel(-self.0)
    }
}

impl TryFrom<i32> for SpinLevel {
    type Error = crate::error::Error;
    fn try_from(m: i32) -> Result<Self> {
        SpinLevel::new(m)
    }
}

impl From<SpinLevel> for i32 {
    fn from(l: SpinLevel) -> i32 {
        l.m()
    }
}

/// Index of `|m1, m2⟩` in the pair basis.
pub fn basis_index(m1: SpinLevel, m2: SpinLevel) -> usize {
    LEVELS * m1.index() + m2.index()
}

/// [`basis_index`] on raw integers.
pub fn basis_index_of(m1: i32, m2: i32) -> Result<usize> {
    Ok(basis_index(SpinLevel::new(m1)?, SpinLevel::new(m2)?))
}

/// Inverse of [`basis_index`].
pub fn basis_pair(index: usize) -> Result<(SpinLevel, SpinLevel)> {
    if index >= PAIR_DIM {
        return domain(format!("pair index {index} outside [0, 24]"));
    }
    Ok((
        SpinLevel::ALL[index / LEVELS],
        SpinLevel::ALL[index % LEVELS],
    ))
}

/// Kronecker product `a ⊗ b` of two single-atom operators.
pub fn kron(a: &AtomOp, b: &AtomOp) -> PairOp {
    let mut out = PairOp::zeros();
    for i in 0..LEVELS {
        for j in 0..LEVELS {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..LEVELS {
                for l in 0..LEVELS {
                    out[(LEVELS * i + k, LEVELS * j + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Particle-exchange operator `|m1,m2⟩ → |m2,m1⟩`.
pub fn swap_operator() -> PairOp {
    let mut s = PairOp::zeros();
    for a in 0..LEVELS {
        for b in 0..LEVELS {
            s[(LEVELS * b + a, LEVELS * a + b)] = Complex64::new(1.0, 0.0);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_index_convention() {
        assert_eq!(basis_index_of(-2, -2).unwrap(), 0);
        assert_eq!(basis_index_of(2, 2).unwrap(), 24);
        assert_eq!(basis_index_of(0, 0).unwrap(), 12);
        assert_eq!(basis_index_of(1, -1).unwrap(), 16);
    }

    #[test]
    fn basis_index_rejects_out_of_range() {
        assert!(matches!(basis_index_of(3, 0), Err(crate::Error::Domain(_))));
        assert!(basis_index_of(0, -3).is_err());
        assert!(basis_pair(25).is_err());
    }

    #[test]
    fn basis_index_round_trips() {
        let mut seen = [false; PAIR_DIM];
        for m1 in SpinLevel::ALL {
            for m2 in SpinLevel::ALL {
                let i = basis_index(m1, m2);
                assert!(!seen[i]);
                seen[i] = true;
                assert_eq!(basis_pair(i).unwrap(), (m1, m2));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn swap_is_an_involution() {
        let s = swap_operator();
        assert_eq!(s * s, PairOp::identity());
    }

    #[test]
    fn spin_level_serde_uses_integer_m() {
        assert_eq!(SpinLevel::try_from(-1).unwrap(), SpinLevel::MINUS_ONE);
        assert!(SpinLevel::try_from(5).is_err());
        assert_eq!(i32::from(SpinLevel::PLUS_TWO), 2);
    }
}
