//! Dense operator construction on the composite space.
//!
//! Everything here returns an [`OperatorMatrix`] sized to the full composite
//! space (or the bare Fock / qubit factor where the name says so), using the
//! `qubit ⊗ fock` ordering fixed in [`crate::hilbert`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{Collective, HilbertSpace, QUBIT_DIM};

/// Dense complex matrix used for all operators and density matrices.
pub type OperatorMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Annihilation operator `b` on the bare truncated Fock space:
/// `b|n⟩ = √n |n−1⟩`.
pub fn fock_annihilation(space: &HilbertSpace) -> OperatorMatrix {
    let d = space.fock_dim();
    let mut b = OperatorMatrix::zeros(d, d);
    for n in 1..d {
        b[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    b
}

/// Number operator `b†b` on the bare truncated Fock space.
pub fn fock_number(space: &HilbertSpace) -> OperatorMatrix {
    let d = space.fock_dim();
    OperatorMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        (0..d).map(|n| Complex64::new(n as f64, 0.0)),
    ))
}

/// Bare 4×4 collective transition operator `R_jk = |j⟩⟨k|`.
pub fn qubit_projector(j: Collective, k: Collective) -> OperatorMatrix {
    let mut r = OperatorMatrix::zeros(QUBIT_DIM, QUBIT_DIM);
    r[(j.index(), k.index())] = ONE;
    r
}

/// `R_jk ⊗ I_fock` on the composite space.
pub fn collective_projector(space: &HilbertSpace, j: Collective, k: Collective) -> OperatorMatrix {
    embed_qubit(space, &qubit_projector(j, k))
}

/// `I_qubit ⊗ A` for a Fock-space operator `A`.
pub fn embed_fock(space: &HilbertSpace, a: &OperatorMatrix) -> OperatorMatrix {
    debug_assert_eq!(a.nrows(), space.fock_dim());
    OperatorMatrix::identity(QUBIT_DIM, QUBIT_DIM).kronecker(a)
}

/// `A ⊗ I_fock` for a collective-qubit operator `A`.
pub fn embed_qubit(space: &HilbertSpace, a: &OperatorMatrix) -> OperatorMatrix {
    debug_assert_eq!(a.nrows(), QUBIT_DIM);
    a.kronecker(&OperatorMatrix::identity(space.fock_dim(), space.fock_dim()))
}

/// `I₄ ⊗ b†b` — the resonator phonon-number observable on the composite
/// space.
pub fn resonator_number(space: &HilbertSpace) -> OperatorMatrix {
    embed_fock(space, &fock_number(space))
}

/// `I₄ ⊗ |0⟩⟨0|` — projector onto the resonator ground state, irrespective of
/// the qubit state.
pub fn resonator_ground_projector(space: &HilbertSpace) -> OperatorMatrix {
    let d = space.fock_dim();
    let mut vac = OperatorMatrix::zeros(d, d);
    vac[(0, 0)] = ONE;
    embed_fock(space, &vac)
}

/// Thermal (geometric) state on the bare Fock space with mean occupation
/// `n_thermal`, renormalized on the truncated basis so its trace is exactly 1.
pub fn thermal_fock_state(space: &HilbertSpace, n_thermal: f64) -> Result<OperatorMatrix> {
    if !(n_thermal >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "thermal occupation must be >= 0, got {n_thermal}"
        )));
    }
    let d = space.fock_dim();
    let mut weights = vec![0.0f64; d];
    if n_thermal == 0.0 {
        weights[0] = 1.0;
    } else {
        let ratio = n_thermal / (1.0 + n_thermal);
        let mut w = 1.0;
        for weight in weights.iter_mut() {
            *weight = w;
            w *= ratio;
        }
    }
    let norm: f64 = weights.iter().sum();
    let mut rho = OperatorMatrix::zeros(d, d);
    for (n, w) in weights.iter().enumerate() {
        rho[(n, n)] = Complex64::new(w / norm, 0.0);
    }
    Ok(rho)
}

/// `tr(O ρ)`.
pub fn expectation(op: &OperatorMatrix, rho: &OperatorMatrix) -> Result<Complex64> {
    if op.nrows() != rho.nrows() || op.ncols() != rho.ncols() || op.nrows() != op.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expectation needs square matrices of equal size, got {}x{} and {}x{}",
            op.nrows(),
            op.ncols(),
            rho.nrows(),
            rho.ncols()
        )));
    }
    // tr(Oρ) = Σ_ij O_ij ρ_ji without forming the product.
    let mut acc = ZERO;
    for i in 0..op.nrows() {
        for j in 0..op.ncols() {
            acc += op[(i, j)] * rho[(j, i)];
        }
    }
    Ok(acc)
}

/// Trace of a square matrix.
pub fn trace(m: &OperatorMatrix) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..m.nrows().min(m.ncols()) {
        acc += m[(i, i)];
    }
    acc
}
