//! Helpers shared between the integration suites.
#![allow(dead_code)]

use dicke_cooling::{DissipatorForm, DissipatorSpec, OperatorMatrix, PhysicalParams};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::RngExt;

/// Random full-rank density matrix: ρ = M M† / tr(M M†).
pub fn random_density(rng: &mut StdRng, d: usize) -> OperatorMatrix {
    let m = OperatorMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let rho = &m * m.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Random Hermitian (not necessarily positive) matrix, for linearity checks.
pub fn random_hermitian(rng: &mut StdRng, d: usize) -> OperatorMatrix {
    let m = OperatorMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Direct dense evaluation of the generator: −i[H, ρ] plus every dissipator,
/// written exactly as matrix products. This is the oracle the vectorized
/// superoperator is checked against.
pub fn lindblad_rhs(
    h: &OperatorMatrix,
    dissipators: &[DissipatorSpec],
    rho: &OperatorMatrix,
) -> OperatorMatrix {
    let i = Complex64::new(0.0, 1.0);
    let mut out = (rho * h - h * rho) * i;
    for spec in dissipators {
        let half = Complex64::new(0.5 * spec.rate, 0.0);
        match &spec.form {
            DissipatorForm::Standard(a) => {
                let ad = a.adjoint();
                let ada = &ad * a;
                out += (a * rho * &ad * Complex64::new(2.0, 0.0) - &ada * rho - rho * &ada) * half;
            }
            DissipatorForm::Cross(a1, a2) => {
                for (x, y) in [(a1, a2), (a2, a1)] {
                    let yd = y.adjoint();
                    let ydx = &yd * x;
                    out +=
                        (x * rho * &yd * Complex64::new(2.0, 0.0) - &ydx * rho - rho * &ydx) * half;
                }
            }
        }
    }
    out
}

/// ½ tr |a − b| via the singular values of the difference.
pub fn trace_distance(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    let diff = a - b;
    0.5 * diff.svd(false, false).singular_values.iter().sum::<f64>()
}

/// Strong-coupling / low-Q parameters: physically a heating regime, but every
/// rate is large, so generator-level structure can be exercised at tiny
/// truncations.
pub fn structural_params() -> PhysicalParams {
    PhysicalParams {
        nu: 0.5,
        quality: 100.0,
        gamma_a: 0.1,
        gamma_s: 1.9,
        gamma_phi: 0.3,
        eta: 0.05,
        omega: 4.0,
        lambda: 20.0,
        delta: 20.5,
        n_thermal: 2.0,
        fock_dim: 5,
    }
}

/// The experimental cooling point: subradiant width 0.05, red-sideband drive.
pub fn cooling_params() -> PhysicalParams {
    let mut p = PhysicalParams::default()
        .with_subradiant_width(0.05)
        .on_red_sideband();
    p.fock_dim = 5;
    p
}
