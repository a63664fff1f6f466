mod common;

use pairspin::relaxation::{
    build_rate_generator, evolve_populations, prepared_state, PopulationVector, RateConfig,
};
use pairspin::spin::{
    exchange_symmetric_weight, symmetric_pair_state, SpectatorDistribution, SpinLevel,
};
use proptest::prelude::*;
use rand::Rng;

fn rates_strategy(max: f64) -> impl Strategy<Value = RateConfig> {
    (prop::array::uniform6(0.0..=max), 0.0f64..=1.0).prop_map(|(r, f)| RateConfig {
        zero_to_chi1: r[0],
        chi1_to_zero: r[1],
        chi1_to_chi2: r[2],
        chi2_to_chi1: r[3],
        zero_to_chi2: r[4],
        chi2_to_zero: r[5],
        coherence_fraction: f,
    })
}

fn start_strategy() -> impl Strategy<Value = PopulationVector> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, b)| {
        let p00 = a;
        let p_chi1 = (1.0 - a) * b;
        PopulationVector { p00, p_chi1, p_chi2: 1.0 - p00 - p_chi1 }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn probability_is_conserved(rates in rates_strategy(1e3), p0 in start_strategy(), t in 0.0f64..=10.0) {
        let q = build_rate_generator(&rates).unwrap();
        let p = evolve_populations(p0, &q, t).unwrap();
        prop_assert!((p.sum() - 1.0).abs() < 1e-12, "sum {}", p.sum());
        prop_assert!(p.p00 >= -1e-12 && p.p_chi1 >= -1e-12 && p.p_chi2 >= -1e-12);
    }

    #[test]
    fn generator_structure(rates in rates_strategy(1e3)) {
        let q = build_rate_generator(&rates).unwrap();
        for c in 0..3 {
            prop_assert!(q.matrix().column(c).sum().abs() < 1e-14 * 1e3);
            for r in 0..3 {
                if r != c {
                    prop_assert!(q.matrix()[(r, c)] >= 0.0);
                }
            }
        }
    }

    #[test]
    fn prepared_state_confined_to_subspace(rates in rates_strategy(50.0), t in 0.0f64..=1.0) {
        let none = SpectatorDistribution::uniform(0.0).unwrap();
        let rho = prepared_state(&rates, t, 0.0, &none).unwrap();
        for a in SpinLevel::ALL {
            for b in SpinLevel::ALL {
                if a.m() + b.m() != 0 {
                    prop_assert!(rho.population(a, b) < 1e-14);
                }
            }
        }
        // antisymmetric weight is (1 − f)/2 of the χ₁ population, none in χ₂
        let p_chi1 = rho.population(SpinLevel::PLUS_ONE, SpinLevel::MINUS_ONE)
            + rho.population(SpinLevel::MINUS_ONE, SpinLevel::PLUS_ONE);
        let expected = 0.5 * (1.0 - rates.coherence_fraction) * p_chi1;
        let minus1 = symmetric_pair_state(1, -1).unwrap().projector().into_matrix();
        let minus2 = symmetric_pair_state(2, -1).unwrap().projector().into_matrix();
        prop_assert!((rho.expectation(&minus1).re - expected).abs() < 1e-14);
        prop_assert!(rho.expectation(&minus2).re.abs() < 1e-14);
        prop_assert!((exchange_symmetric_weight(&rho) - (1.0 - expected)).abs() < 1e-12);
        rho.check().unwrap();
    }
}

/// Explicit Euler with dt = 1e-6 s as an independent oracle.
fn euler(rates: &RateConfig, p0: [f64; 3], t: f64) -> [f64; 3] {
    let dt = 1e-6;
    let steps = (t / dt).round() as usize;
    let mut p = p0;
    for _ in 0..steps {
        let [a, b, c] = p;
        let d00 = -(rates.zero_to_chi1 + rates.zero_to_chi2) * a + rates.chi1_to_zero * b + rates.chi2_to_zero * c;
        let d1 = rates.zero_to_chi1 * a - (rates.chi1_to_zero + rates.chi1_to_chi2) * b + rates.chi2_to_chi1 * c;
        let d2 = rates.zero_to_chi2 * a + rates.chi1_to_chi2 * b - (rates.chi2_to_chi1 + rates.chi2_to_zero) * c;
        p = [a + dt * d00, b + dt * d1, c + dt * d2];
    }
    p
}

#[test]
fn matrix_exponential_matches_euler() {
    // Euler's own error is ≈ 0.27·dt/t at worst, so t ≥ 0.5 s keeps it below 1e-6
    let mut rng = common::rng(3);
    for _ in 0..12 {
        let r: [f64; 6] = std::array::from_fn(|_| rng.random_range(0.0..10.0));
        let rates = RateConfig {
            zero_to_chi1: r[0],
            chi1_to_zero: r[1],
            chi1_to_chi2: r[2],
            chi2_to_chi1: r[3],
            zero_to_chi2: r[4],
            chi2_to_zero: r[5],
            coherence_fraction: 1.0,
        };
        let t = rng.random_range(0.5..1.0);
        let q = build_rate_generator(&rates).unwrap();
        let exact = evolve_populations(PopulationVector::GROUND, &q, t).unwrap();
        let approx = euler(&rates, [1.0, 0.0, 0.0], t);
        for (a, b) in [exact.p00, exact.p_chi1, exact.p_chi2].iter().zip(approx) {
            assert!((a - b).abs() < 1e-6, "expm {a} vs euler {b}");
        }
    }
}
