//! Steady-state simulator for sideband cooling of a nanomechanical resonator
//! through a pair of inductively coupled flux qubits.
//!
//! The two qubits are treated in their collective basis
//! `{|g⟩, |a⟩, |s⟩, |e⟩}`, where the subradiant state `|a⟩` decays at the
//! narrow rate Γ_a and the superradiant `|s⟩` at Γ_s. A drive on the
//! red sideband (detuning Δ = ν + Λ) makes the `|g⟩ → |a⟩` transition remove
//! one phonon per excitation, and the narrow subradiant linewidth sets the
//! cooling limit. The crate builds the full Lindblad generator for this
//! system — collective emission, Lamb-Dicke sideband emission and its
//! interference cross terms, single-qubit dephasing, and the thermal
//! resonator bath — vectorizes it into a sparse superoperator, and solves
//! for the steady state directly.
//!
//! Modules:
//! * [`hilbert`], [`operators`] — the composite space and dense operators,
//! * [`model`] — parameters, Hamiltonian, and the dissipator list,
//! * [`liouvillian`] — column-stacking vectorization into a sparse matrix,
//! * [`steady`] — trace-constrained direct solve, eigenvalue validation, and
//!   Fock-truncation growth,
//! * [`evolve`] — adaptive time integration as an independent cross-check,
//! * [`analysis`] — parameter sweeps, contribution splits, and the fitted
//!   cooling-limit formula.
//!
//! All rates and frequencies are in units of the single-qubit decay rate γ
//! (with ħ = 1); time is in units of 1/γ.

pub mod analysis;
pub mod error;
pub mod evolve;
pub mod hilbert;
pub mod liouvillian;
pub mod model;
pub mod operators;
pub mod steady;

pub use analysis::{
    eval_cooling_formula, fit_cg, nu_opt, run_sweep, run_sweep_with, split_contributions,
    split_contributions_with, FitResult, SweepAxis, SweepResult, SweepRow, SweepSpec,
};
pub use error::{Error, Result};
pub use evolve::{time_evolve, EvolutionTrajectory, EvolveOptions};
pub use hilbert::{Collective, HilbertSpace, QUBIT_DIM};
pub use liouvillian::{unvec_density, vec_density, vectorize, Superoperator};
pub use model::{
    build_dissipators, build_hamiltonian, dephasing_operators, derive_lamb_dicke, DeviceParams,
    DissipatorForm, DissipatorSpec, PhysicalParams, FLUX_QUANTUM, HBAR,
};
pub use operators::{
    collective_projector, embed_fock, embed_qubit, expectation, fock_annihilation, fock_number,
    qubit_projector, resonator_ground_projector, resonator_number, thermal_fock_state, trace,
    OperatorMatrix,
};
pub use steady::{
    converged_nss, converged_nss_with, steady_state, steady_state_with, SolverOptions,
    SteadyStateResult,
};
