#![allow(dead_code)]

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use pairspin::pulse::{FreeEvolution, PulseSequence, RamanPulse, Segment};
use pairspin::spin::{AtomOp, DensityMatrix, PairOp, LEVELS, PAIR_DIM};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_pair(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box–Muller
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    Complex64::new(r * (2.0 * std::f64::consts::PI * u2).cos(), r * (2.0 * std::f64::consts::PI * u2).sin())
}

/// Haar-ish random single-atom unitary from the QR of a Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> AtomOp {
    let a = SMatrix::<Complex64, LEVELS, LEVELS>::from_fn(|_, _| gaussian_pair(rng));
    a.qr().q()
}

/// Full-rank random state `A A† / Tr`, optionally of lower rank.
pub fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> DensityMatrix {
    let mut m = PairOp::zeros();
    for _ in 0..rank {
        let v = SVector::<Complex64, PAIR_DIM>::from_fn(|_, _| gaussian_pair(rng));
        m += v * v.adjoint();
    }
    let tr = m.trace();
    DensityMatrix::new(m / tr).expect("random state is valid")
}

/// Random state of rank 1 to 4.
pub fn random_block_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let rank = 1 + (rng.random::<u32>() % 4) as usize;
    random_density(rng, rank)
}

pub fn random_sequence(rng: &mut ChaCha8Rng) -> PulseSequence {
    let n = 1 + (rng.random::<u32>() % 4) as usize;
    let segments = (0..n)
        .map(|_| {
            if rng.random::<bool>() {
                Segment::Pulse(RamanPulse {
                    rabi_rate: rng.random_range(0.0..3e5),
                    detuning: rng.random_range(-2e5..2e5),
                    duration: rng.random_range(0.0..5e-5),
                    phase: rng.random_range(-3.2..3.2),
                })
            } else {
                Segment::Wait(FreeEvolution {
                    detuning: rng.random_range(-2e5..2e5),
                    duration: rng.random_range(0.0..2e-5),
                })
            }
        })
        .collect();
    PulseSequence::new(segments).unwrap()
}
