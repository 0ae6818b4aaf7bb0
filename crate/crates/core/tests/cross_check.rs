//! The oracle and the reduced kernel describe the same steady state.

use fano_core::oracle::{self, OracleControls};
use fano_core::{effective, profiles, Execution, ModelParams};

#[test]
fn oracle_reproduces_kernel_population_on_resonance() {
    let p = ModelParams::default();
    let kernel = effective::continuum_population(&p, p.omega_e).unwrap();
    let o = oracle::population(&p, p.omega_e, OracleControls::Auto).unwrap();
    assert!(((o - kernel) / kernel).abs() < 1e-3, "oracle {o} kernel {kernel}");
}

#[test]
fn sequential_and_parallel_profiles_are_identical() {
    let p = ModelParams { omega: 0.4, gamma_e: 0.2, ..Default::default() };
    let omegas: Vec<f64> = (0..9).map(|i| 8.0 + 0.5 * i as f64).collect();
    let c = OracleControls::Fixed { n: 101, half_width: 10.0 };
    let a = oracle::profile(&p, &omegas, c, Execution::Sequential).unwrap();
    let b = oracle::profile(&p, &omegas, c, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn kernel_profile_follows_closed_form_away_from_weak_field() {
    let p = ModelParams { omega: 0.8, gamma_c: 2.0, ..Default::default() };
    let ef = profiles::effective_params_population(&p).unwrap();
    let omegas: Vec<f64> = (0..41).map(|i| 4.0 + 0.3 * i as f64).collect();
    let states = effective::solve_profile(&p, &omegas, Execution::default()).unwrap();
    for (w, s) in omegas.iter().zip(&states) {
        let closed = profiles::generalized_profile(&ef, *w);
        assert!((s.n_c - closed).abs() < 1e-10, "ω={w}: {} vs {closed}", s.n_c);
    }
}
