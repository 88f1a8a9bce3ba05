mod common;

use std::f64::consts::PI;

use bjj_lgi::dynamics::*;
use bjj_lgi::*;
use proptest::prelude::*;

fn spectrum(n: usize, lambda: f64) -> Spectrum64 {
    diagonalize(&build_hamiltonian(&ModelParams::with_lambda(n, lambda).unwrap())).unwrap()
}

fn random_state(n: usize, seed: &[f64]) -> QuantumState64 {
    let amps = (0..=n)
        .map(|k| {
            let a = seed[k % seed.len()] + 0.1 * k as f64;
            num_complex::Complex64::new(a.sin(), (1.7 * a).cos())
        })
        .collect();
    QuantumState::normalized(amps).unwrap()
}

#[test]
fn evolution_matches_matrix_exponential() {
    for n in 1..=10 {
        for &(lambda, t) in &[(0.0, 0.9), (1.7, 3.3), (-4.0, 11.0), (25.0, 0.37)] {
            let h = common::dense_hamiltonian(n, 1.0, lambda);
            let u = common::expm(&h, t);
            let psi0 = random_state(n, &[0.3, 1.1, 2.9]);
            let want = &u * common::to_vector(&psi0);
            let got = spectrum(n, lambda).evolve(&psi0, t).unwrap();
            for (a, b) in got.amplitudes().iter().zip(want.iter()) {
                assert!((a - b).norm() < 1e-9, "N={n} Λ={lambda} t={t}");
            }
        }
    }
}

#[test]
fn interaction_sign_does_not_change_distributions() {
    for n in [7usize, 50] {
        for lambda in [0.5, 1.7, 3.0] {
            let (a, b) = (spectrum(n, lambda), spectrum(n, -lambda));
            for init in [0, n / 3, n / 2, n] {
                let psi0 = fock_state(init, n).unwrap();
                let times: Vec<f64> = (0..=40).map(|k| k as f64 * 0.5).collect();
                let pa = probability_series_with(&a, &psi0, &times).unwrap();
                let pb = probability_series_with(&b, &psi0, &times).unwrap();
                for (x, y) in pa.distributions.iter().flatten().zip(pb.distributions.iter().flatten()) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn mirrored_initial_state_gives_mirrored_distribution() {
    let n = 23;
    let spec = spectrum(n, 1.3);
    for l in [0usize, 4, 11] {
        let a = probability_series_with(&spec, &fock_state(n - l, n).unwrap(), &[0.7, 5.2]).unwrap();
        let b = probability_series_with(&spec, &fock_state(l, n).unwrap(), &[0.7, 5.2]).unwrap();
        for (da, db) in a.distributions.iter().zip(&b.distributions) {
            for k in 0..=n {
                assert!((da[k] - db[n - k]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn distributions_are_normalized() {
    let spec = spectrum(64, 2.2);
    let s = probability_series_with(&spec, &fock_state(50, 64).unwrap(), &[0.0, 1.0, 10.0, 100.0]).unwrap();
    for d in &s.distributions {
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(d.iter().all(|&p| p >= 0.0));
    }
}

#[test]
fn zero_time_is_the_initial_state() {
    let params = ModelParams::with_lambda(12, 0.9).unwrap();
    let s = probability_series(&params, &fock_state(7, 12).unwrap(), &[0.0]).unwrap();
    assert_eq!(s.peaks(), vec![7]);
    assert_eq!(s.distributions[0][7], 1.0);
    let z = imbalance_series(&params, &fock_state(7, 12).unwrap(), &[0.0]).unwrap();
    assert_eq!(z[0], 2.0 / 12.0);
}

#[test]
fn self_trapped_peak_stays_on_the_left() {
    let n = 200;
    let params = ModelParams::with_lambda(n, 2.5).unwrap();
    let times: Vec<f64> = (0..=400).map(|k| 2.0 * 2.0 * PI * k as f64 / 400.0).collect();
    let s = probability_series(&params, &fock_state(n, n).unwrap(), &times).unwrap();
    assert!(s.peaks().iter().all(|&p| 2 * p > n));
}

#[test]
fn free_peak_returns_after_one_period() {
    let params = ModelParams::with_lambda(100, 0.0).unwrap();
    let s = probability_series(&params, &fock_state(100, 100).unwrap(), &[PI, 2.0 * PI]).unwrap();
    assert_eq!(s.peaks(), vec![0, 100]);
    assert!((s.distributions[1][100] - 1.0).abs() < 1e-10);
}

#[test]
fn larger_junctions_oscillate_coherently_for_longer() {
    let period = josephson_period(1.0);
    let times: Vec<f64> = (0..=1500).map(|k| k as f64 * 0.1).collect();
    let decay = |n: usize| {
        let params = ModelParams::with_lambda(n, 1.5).unwrap();
        let z = imbalance_series(&params, &fock_state(n, n).unwrap(), &times).unwrap();
        envelope_decay_time(&times, &z, period, 0.5)
    };
    let small = decay(100).expect("N=100 envelope decays within the window");
    let large = decay(2000).expect("N=2000 envelope decays within the window");
    assert!(large > small, "{large} vs {small}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_is_unitary(n in 1usize..=200, lambda in -10.0f64..10.0, t in 0.0f64..200.0, seed in 0.0f64..6.0) {
        let psi0 = random_state(n, &[seed, seed * 1.3 + 0.2]);
        let psi = spectrum(n, lambda).evolve(&psi0, t).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_composes(n in 1usize..=120, lambda in -10.0f64..10.0, t1 in 0.0f64..20.0, t2 in 0.0f64..20.0, seed in 0.0f64..6.0) {
        let spec = spectrum(n, lambda);
        let psi0 = random_state(n, &[seed]);
        let direct = spec.evolve(&psi0, t1 + t2).unwrap();
        let staged = spec.evolve(&spec.evolve(&psi0, t1).unwrap(), t2).unwrap();
        for (a, b) in direct.amplitudes().iter().zip(staged.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn evolution_is_reversible(n in 1usize..=120, lambda in -10.0f64..10.0, t in 0.0f64..30.0, seed in 0.0f64..6.0) {
        let spec = spectrum(n, lambda);
        let psi0 = random_state(n, &[seed, 2.0]);
        let back = spec.evolve(&spec.evolve(&psi0, t).unwrap(), -t).unwrap();
        for (a, b) in back.amplitudes().iter().zip(psi0.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn energy_is_conserved(n in 1usize..=120, lambda in -10.0f64..10.0, t in 0.0f64..50.0, seed in 0.0f64..6.0) {
        let params = ModelParams::with_lambda(n, lambda).unwrap();
        let h = build_hamiltonian(&params);
        let spec = diagonalize(&h).unwrap();
        let psi0 = random_state(n, &[seed]);
        let e0 = h.energy(&psi0);
        let e1 = h.energy(&spec.evolve(&psi0, t).unwrap());
        prop_assert!((e0 - e1).abs() < 1e-10 * spec.scale().max(1.0));
    }

    #[test]
    fn sign_symmetry_for_random_fock_states(n in 1usize..=60, lambda in 0.0f64..5.0, t in 0.0f64..20.0, init in 0usize..=60) {
        let init = init.min(n);
        let psi0 = fock_state(init, n).unwrap();
        let a = probability_series_with(&spectrum(n, lambda), &psi0, &[t]).unwrap();
        let b = probability_series_with(&spectrum(n, -lambda), &psi0, &[t]).unwrap();
        for (x, y) in a.distributions[0].iter().zip(&b.distributions[0]) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}
