//! The composite Hilbert space: collective two-qubit states tensored with
//! a truncated resonator Fock space.
//!
//! The basis ordering is fixed here, once, for the whole crate:
//!
//! ```text
//! index(q, n) = q * fock_dim + n
//! ```
//!
//! with the collective label `q` in `{g = 0, a = 1, s = 2, e = 3}` and the
//! phonon number `n` in `0..fock_dim` (qubit-major, Fock-minor). Composite
//! operators are therefore Kronecker products `qubit ⊗ fock`, and every
//! module builds them through this ordering rather than inventing its own.

use crate::error::{Error, Result};

/// Dimension of the collective two-qubit space `{|g⟩, |a⟩, |s⟩, |e⟩}`.
pub const QUBIT_DIM: usize = 4;

/// Collective (Dicke) states of the two coupled qubits.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Collective {
    /// `|g⟩ = |g_L g_R⟩`
    Ground = 0,
    /// `|a⟩ = (|e_L g_R⟩ − |g_L e_R⟩)/√2`, the subradiant state.
    Anti = 1,
    /// `|s⟩ = (|e_L g_R⟩ + |g_L e_R⟩)/√2`, the superradiant state.
    Sym = 2,
    /// `|e⟩ = |e_L e_R⟩`
    Excited = 3,
}

impl Collective {
    pub const ALL: [Collective; 4] = [
        Collective::Ground,
        Collective::Anti,
        Collective::Sym,
        Collective::Excited,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

/// The composite space `(collective qubits) ⊗ (Fock levels 0..fock_dim)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    fock_dim: usize,
}

impl HilbertSpace {
    /// Requires at least two Fock levels; a single level cannot carry the
    /// annihilation operator.
    pub fn new(fock_dim: usize) -> Result<Self> {
        if fock_dim < 2 {
            return Err(Error::InvalidDimension(format!(
                "fock_dim must be >= 2, got {fock_dim}"
            )));
        }
        Ok(Self { fock_dim })
    }

    #[inline]
    pub fn qubit_dim(&self) -> usize {
        QUBIT_DIM
    }

    #[inline]
    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    #[inline]
    pub fn total_dim(&self) -> usize {
        QUBIT_DIM * self.fock_dim
    }

    /// Composite basis index of `|q, n⟩`.
    #[inline]
    pub fn index(&self, q: Collective, n: usize) -> usize {
        debug_assert!(n < self.fock_dim);
        q.index() * self.fock_dim + n
    }
}
