//! Steady-state solver against independent routes: explicit time evolution,
//! decoupling limits, and the expected scaling of the heating contributions.

mod common;

use common::{cooling_params, random_density, trace_distance};
use dicke_cooling::{
    build_dissipators, build_hamiltonian, expectation, fock_number, split_contributions,
    steady_state, thermal_fock_state, time_evolve, vectorize, EvolveOptions, OperatorMatrix,
    PhysicalParams, Superoperator,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn generator(p: &PhysicalParams) -> Superoperator {
    let space = p.space().unwrap();
    let h = build_hamiltonian(p, &space).unwrap();
    let diss = build_dissipators(&p, &space).unwrap();
    vectorize(&h, &diss).unwrap()
}

/// Every dynamical rate within a factor ~30 of the fastest frequency, so the
/// integrator reaches the fixed point in a few hundred time units.
fn relaxing_params() -> PhysicalParams {
    PhysicalParams {
        nu: 0.5,
        quality: 10.0,
        gamma_a: 0.1,
        gamma_s: 1.9,
        gamma_phi: 0.3,
        eta: 0.05,
        omega: 1.0,
        lambda: 2.0,
        delta: 2.5,
        n_thermal: 0.5,
        fock_dim: 5,
    }
}

#[test]
fn time_evolution_reaches_the_nullspace_state() {
    let p = relaxing_params();
    let l = generator(&p);
    let d = l.dim();
    let steady = steady_state(&l).unwrap();

    let mut vacuum = OperatorMatrix::zeros(d, d);
    vacuum[(0, 0)] = Complex64::new(1.0, 0.0);
    let mixed = OperatorMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0);
    let mut rng = StdRng::seed_from_u64(23);
    let random = random_density(&mut rng, d);

    for rho0 in [vacuum, mixed, random] {
        let traj = time_evolve(&l, &rho0, 500.0, &EvolveOptions::default()).unwrap();
        let dist = trace_distance(&traj.final_rho, &steady.rho_ss);
        assert!(dist < 1e-6, "trace distance to steady state {dist:.3e}");
        assert!(traj.trace_error.iter().all(|&e| e < 1e-6));
    }
}

#[test]
fn zero_lamb_dicke_leaves_resonator_thermal() {
    let mut p = cooling_params();
    p.eta = 0.0;
    p.gamma_phi = 0.3;
    p.n_thermal = 1.0;
    p.fock_dim = 22;
    let space = p.space().unwrap();
    let l = generator(&p);
    let res = steady_state(&l).unwrap();

    // Decoupled resonator: exactly the truncated thermal state, and within
    // 0.1% of the untruncated occupation at this depth.
    let thermal = thermal_fock_state(&space, 1.0).unwrap();
    let n_trunc = expectation(&fock_number(&space), &thermal).unwrap().re;
    assert!((res.n_ss - n_trunc).abs() < 1e-8);
    assert!(
        (res.n_ss - 1.0).abs() / 1.0 < 1e-3,
        "decoupled n_ss = {} should stay at the bath occupation",
        res.n_ss
    );
}

#[test]
fn environmental_heating_scales_with_bath_and_quality() {
    let base = cooling_params();
    let (env0, scatter0) = split_contributions(&base).unwrap();

    let mut double_bath = base.clone();
    double_bath.n_thermal *= 2.0;
    let (env_2n, _) = split_contributions(&double_bath).unwrap();
    let ratio_bath = env_2n / env0;
    assert!(
        (ratio_bath - 2.0).abs() < 0.05 * 2.0,
        "doubling the bath occupation scaled n_env by {ratio_bath}"
    );

    let mut double_q = base.clone();
    double_q.quality *= 2.0;
    let (env_2q, _) = split_contributions(&double_q).unwrap();
    let ratio_q = env_2q / env0;
    assert!(
        (ratio_q - 0.5).abs() < 0.05 * 0.5,
        "doubling the quality factor scaled n_env by {ratio_q}"
    );

    // Scattering floor does not depend on the bath.
    let (_, scatter_2n) = split_contributions(&double_bath).unwrap();
    assert!((scatter_2n - scatter0).abs() < 0.05 * scatter0);
}
