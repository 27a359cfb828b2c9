//! The bit-parallel sampler against the exact tilted transfer matrix.

use chargefcs_core::coupled::build_pair_gate;
use chargefcs_core::sep::{exact_sep_cgf, run_sep_range};
use chargefcs_core::{ChemicalPotential, Complex64, ModelParams};

#[test]
fn sampled_generating_function_matches_exact() {
    let n = 100_000u64;
    let bound = 5.0 / (n as f64).sqrt();
    for l in [6, 10] {
        for t in [2, 6] {
            for mu in [
                ChemicalPotential::ZERO,
                ChemicalPotential::Finite(2.0),
                ChemicalPotential::PlusInfinity,
            ] {
                let params = ModelParams::new(l, t, mu).with_seed(l as u64 * 100 + t as u64);
                let hist = run_sep_range(&params, 0..n).unwrap();
                for lam in [0.3, 1.0, 2.5] {
                    let z = exact_sep_cgf(&params, lam).unwrap();
                    let emp: Complex64 = hist
                        .counts
                        .iter()
                        .map(|(&q, &c)| Complex64::from_polar(c as f64 / n as f64, lam * q as f64))
                        .sum();
                    assert!((emp - z).norm() < bound, "L={l} t={t} mu={mu:?} lambda={lam}: {emp} vs {z}");
                }
            }
        }
    }
}

#[test]
fn equilibrium_statistics_are_reflection_symmetric() {
    for l in [4, 8] {
        let params = ModelParams::new(l, 5, ChemicalPotential::ZERO);
        for lam in [0.4, 1.7] {
            let z = exact_sep_cgf(&params, lam).unwrap();
            assert!(z.im.abs() < 1e-14);
            assert!((z - exact_sep_cgf(&params, -lam).unwrap()).norm() < 1e-14);
        }
    }
}

#[test]
fn ladder_gates_satisfy_detailed_balance_with_uniform_measure() {
    for n in [1, 2, 3] {
        for a in [0.0, 0.05, 0.3] {
            let g = build_pair_gate(n, a).unwrap();
            let dim = 1 << (2 * n);
            for i in 0..dim {
                let row: f64 = (0..dim).map(|j| g.probability(i, j)).sum();
                assert!((row - 1.0).abs() < 1e-14);
                for j in 0..dim {
                    assert!((g.probability(i, j) - g.probability(j, i)).abs() < 1e-15);
                }
            }
        }
    }
}
