//! Steady-state computation: sparse direct solve with a trace constraint,
//! an independent smallest-eigenvalue validation path, and automatic growth
//! of the Fock truncation until the phonon number stops moving.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, QUBIT_DIM};
use crate::liouvillian::{unvec_density, vec_density, vectorize, Superoperator};
use crate::model::{build_dissipators, build_hamiltonian, PhysicalParams};
use crate::operators::{
    expectation, resonator_ground_projector, resonator_number, trace, OperatorMatrix,
};

/// faer's factorizations are run single-threaded so that repeated solves are
/// bitwise reproducible; concurrency belongs to the sweep layer, which runs
/// whole solves in parallel.
fn ensure_sequential() {
    static INIT: std::sync::Once = std::sync::Once::new();
    INIT.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Acceptance threshold on ‖𝓛 vec(ρ)‖₂ / ‖vec(ρ)‖₂.
    pub residual_tol: f64,
    /// Ceiling for the automatic Fock-truncation growth.
    pub fock_dim_max: usize,
    /// Also run the eigenvalue validation path and fail if a second
    /// near-steady mode exists, even when the direct solve looks healthy.
    pub check_degeneracy: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            fock_dim_max: 60,
            check_degeneracy: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    pub rho_ss: OperatorMatrix,
    /// Mean phonon number ⟨b†b⟩ (clamped at 0 against round-off).
    pub n_ss: f64,
    /// Resonator ground-state population.
    pub p_ground: f64,
    /// ‖𝓛 vec(ρ_ss)‖₂ / ‖vec(ρ_ss)‖₂.
    pub residual: f64,
    /// Smallest eigenvalue of ρ_ss; slightly negative values are expected
    /// from the Lamb-Dicke cross terms, strongly negative ones mean trouble.
    pub min_eigenvalue: f64,
    pub fock_dim_used: usize,
    /// Truncation convergence (meaningful from [`converged_nss`]; a bare
    /// [`steady_state`] reports `true`, as its own residual check passed).
    pub converged: bool,
}

/// Solves 𝓛 vec(ρ) = 0 with one row of the system replaced by the trace
/// constraint, then Hermitizes and renormalizes. Uses default options.
pub fn steady_state(l: &Superoperator) -> Result<SteadyStateResult> {
    steady_state_with(l, &SolverOptions::default())
}

pub fn steady_state_with(l: &Superoperator, opts: &SolverOptions) -> Result<SteadyStateResult> {
    ensure_sequential();
    let d = l.dim();
    if d % QUBIT_DIM != 0 {
        return Err(Error::InvalidDimension(format!(
            "steady-state observables need the composite layout (dim divisible by {QUBIT_DIM}), got {d}"
        )));
    }
    let space = HilbertSpace::new(d / QUBIT_DIM)?;

    // The Liouvillian rows are linearly dependent (the trace functional is a
    // left null vector), so replacing one equation with tr(ρ) = 1 is exact.
    // Which row is replaced is arbitrary; if the first choice leaves the
    // system ill-conditioned, retry once with the opposite end.
    let mut best: Option<(OperatorMatrix, f64)> = None;
    for replaced_row in [0, l.superdim() - 1] {
        if let Ok((rho, residual)) = solve_with_trace_row(l, replaced_row) {
            let better = best.as_ref().map_or(true, |(_, r)| residual < *r);
            if better {
                best = Some((rho, residual));
            }
            if residual <= opts.residual_tol {
                break;
            }
        }
    }

    let (rho, residual) = match best {
        Some((rho, residual)) if residual <= opts.residual_tol => (rho, residual),
        outcome => {
            let modes = smallest_modes(l)?;
            if modes.second_mode_near_zero() {
                return Err(Error::DegenerateSteadyState(format!(
                    "two near-steady modes found: λ₁ = {:.3e}, λ₂ = {:.3e}",
                    modes.lambda1, modes.lambda2
                )));
            }
            let detail = match outcome {
                Some((_, residual)) => format!("best residual {residual:.3e}"),
                None => "all trace-row solves failed".to_string(),
            };
            return Err(Error::Solver(format!(
                "steady-state solve did not reach residual {:.1e} ({detail}); \
                 spectrum looks non-degenerate (λ₂ = {:.3e})",
                opts.residual_tol, modes.lambda2
            )));
        }
    };

    if opts.check_degeneracy {
        let modes = smallest_modes(l)?;
        if modes.second_mode_near_zero() {
            return Err(Error::DegenerateSteadyState(format!(
                "two near-steady modes found: λ₁ = {:.3e}, λ₂ = {:.3e}",
                modes.lambda1, modes.lambda2
            )));
        }
    }

    let n_op = resonator_number(&space);
    let p0_op = resonator_ground_projector(&space);
    let n_ss = expectation(&n_op, &rho)?.re.max(0.0);
    let p_ground = expectation(&p0_op, &rho)?.re.max(0.0);
    let min_eigenvalue = smallest_density_eigenvalue(&rho);

    Ok(SteadyStateResult {
        rho_ss: rho,
        n_ss,
        p_ground,
        residual,
        min_eigenvalue,
        fock_dim_used: space.fock_dim(),
        converged: true,
    })
}

fn solve_with_trace_row(l: &Superoperator, replaced_row: usize) -> Result<(OperatorMatrix, f64)> {
    let d = l.dim();
    let n = l.superdim();

    let mut triplets: Vec<Triplet<usize, usize, Complex64>> = Vec::with_capacity(l.nnz() + d);
    l.for_each_entry(|r, c, v| {
        if r != replaced_row {
            triplets.push(Triplet::new(r, c, v));
        }
    });
    for j in 0..d {
        triplets.push(Triplet::new(replaced_row, j * d + j, Complex64::new(1.0, 0.0)));
    }
    let m = SparseColMat::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Numerical(format!("constrained system assembly failed: {e:?}")))?;

    let lu = m
        .sp_lu()
        .map_err(|e| Error::Solver(format!("sparse LU factorization failed: {e:?}")))?;
    let mut rhs = Col::<Complex64>::zeros(n);
    rhs[replaced_row] = Complex64::new(1.0, 0.0);
    let x = lu.solve(&rhs);
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Solver("linear solve produced non-finite values".into()));
    }

    // Hermitize (round-off only; the exact steady state is Hermitian) and pin
    // the trace exactly before measuring the residual.
    let raw: Vec<Complex64> = x.iter().copied().collect();
    let rho = unvec_density(&raw)?;
    let mut rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = trace(&rho);
    if tr.norm() < 1e-12 {
        return Err(Error::Solver("trace of candidate steady state vanished".into()));
    }
    rho /= tr;

    let v = vec_density(&rho);
    let mut lv = vec![Complex64::new(0.0, 0.0); n];
    l.apply_slice(&v, &mut lv);
    let norm_lv: f64 = lv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let norm_v: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok((rho, norm_lv / norm_v))
}

struct NullModes {
    /// Ritz value closest to zero — the steady mode.
    lambda1: Complex64,
    /// Second Ritz value; its magnitude lower-bounds the spectral gap seen by
    /// the two-column iteration.
    lambda2: Complex64,
}

impl NullModes {
    fn second_mode_near_zero(&self) -> bool {
        // All generator eigenvalues satisfy Re λ ≤ 0, and every model decay
        // rate in use is far above this scale, so a second eigenvalue this
        // small can only be a second steady (or unphysically slow) mode.
        self.lambda2.norm() < 1e-6
    }
}

/// Validation path independent of the trace-row solve: two-column inverse
/// subspace iteration on (𝓛 − σI) with a small real shift σ > 0. Since every
/// eigenvalue has Re λ ≤ 0, the shifted matrix is nonsingular and the modes
/// closest to σ are exactly the slowest ones.
fn smallest_modes(l: &Superoperator) -> Result<NullModes> {
    ensure_sequential();
    let n = l.superdim();
    let d = l.dim();
    let sigma = 1e-9;

    let mut triplets: Vec<Triplet<usize, usize, Complex64>> = Vec::with_capacity(l.nnz() + n);
    l.for_each_entry(|r, c, v| triplets.push(Triplet::new(r, c, v)));
    for j in 0..n {
        triplets.push(Triplet::new(j, j, Complex64::new(-sigma, 0.0)));
    }
    let m = SparseColMat::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Numerical(format!("shifted system assembly failed: {e:?}")))?;
    let lu = m
        .sp_lu()
        .map_err(|e| Error::Solver(format!("shifted LU factorization failed: {e:?}")))?;

    // Deterministic start: vec(I) (guaranteed overlap with any steady state,
    // whose trace is nonzero) and a graded diagonal as the second direction.
    let mut v = Mat::<Complex64>::zeros(n, 2);
    for j in 0..d {
        v[(j * d + j, 0)] = Complex64::new(1.0, 0.0);
        v[(j * d + j, 1)] = Complex64::new(1.0 + j as f64, 0.0);
    }
    orthonormalize_two(&mut v);

    for _ in 0..5 {
        v = lu.solve(&v);
        if !orthonormalize_two(&mut v) {
            return Err(Error::Numerical(
                "inverse iteration collapsed to a single direction".into(),
            ));
        }
    }

    // Rayleigh-Ritz on the original generator.
    let col: Vec<Vec<Complex64>> = (0..2).map(|j| (0..n).map(|i| v[(i, j)]).collect()).collect();
    let mut w0 = vec![Complex64::new(0.0, 0.0); n];
    let mut w1 = vec![Complex64::new(0.0, 0.0); n];
    l.apply_slice(&col[0], &mut w0);
    l.apply_slice(&col[1], &mut w1);
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };
    let r00 = dot(&col[0], &w0);
    let r01 = dot(&col[0], &w1);
    let r10 = dot(&col[1], &w0);
    let r11 = dot(&col[1], &w1);

    // Eigenvalues of the 2×2 Ritz matrix.
    let tr2 = r00 + r11;
    let det = r00 * r11 - r01 * r10;
    let disc = (tr2 * tr2 - det * Complex64::new(4.0, 0.0)).sqrt();
    let half = Complex64::new(0.5, 0.0);
    let e1 = (tr2 + disc) * half;
    let e2 = (tr2 - disc) * half;
    let (lambda1, lambda2) = if e1.norm() <= e2.norm() { (e1, e2) } else { (e2, e1) };
    Ok(NullModes { lambda1, lambda2 })
}

/// Modified Gram-Schmidt on two columns; returns false if they are linearly
/// dependent to working precision.
fn orthonormalize_two(v: &mut Mat<Complex64>) -> bool {
    let n = v.nrows();
    let norm = |v: &Mat<Complex64>, j: usize| -> f64 {
        (0..n).map(|i| v[(i, j)].norm_sqr()).sum::<f64>().sqrt()
    };
    let n0 = norm(v, 0);
    if n0 == 0.0 {
        return false;
    }
    for i in 0..n {
        v[(i, 0)] /= Complex64::new(n0, 0.0);
    }
    let overlap: Complex64 = (0..n).map(|i| v[(i, 0)].conj() * v[(i, 1)]).sum();
    for i in 0..n {
        let proj = overlap * v[(i, 0)];
        v[(i, 1)] -= proj;
    }
    let n1 = norm(v, 1);
    if n1 < 1e-14 {
        return false;
    }
    for i in 0..n {
        v[(i, 1)] /= Complex64::new(n1, 0.0);
    }
    true
}

fn smallest_density_eigenvalue(rho: &OperatorMatrix) -> f64 {
    let eig = rho.clone().symmetric_eigen();
    eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Runs [`steady_state`] at the requested truncation, then again with five
/// more Fock levels until consecutive phonon numbers agree to
/// max(1% relative, 10⁻⁴ absolute). Returns the last (largest-truncation)
/// result with `converged = true`.
pub fn converged_nss(p: &PhysicalParams) -> Result<SteadyStateResult> {
    converged_nss_with(p, &SolverOptions::default())
}

pub fn converged_nss_with(p: &PhysicalParams, opts: &SolverOptions) -> Result<SteadyStateResult> {
    p.validate()?;
    let mut fock = p.fock_dim.max(2);
    let mut sequence: Vec<f64> = Vec::new();
    let mut prev: Option<f64> = None;
    loop {
        if fock > opts.fock_dim_max {
            return Err(Error::TruncationNotConverged {
                fock_dim_max: opts.fock_dim_max,
                sequence,
            });
        }
        let pf = PhysicalParams {
            fock_dim: fock,
            ..p.clone()
        };
        let space = pf.space()?;
        let h = build_hamiltonian(&pf, &space)?;
        let dissipators = build_dissipators(&pf, &space)?;
        let l = vectorize(&h, &dissipators)?;
        let mut result = steady_state_with(&l, opts)?;
        sequence.push(result.n_ss);
        if let Some(previous) = prev {
            if (result.n_ss - previous).abs() < (1e-2 * result.n_ss).max(1e-4) {
                result.converged = true;
                return Ok(result);
            }
        }
        prev = Some(result.n_ss);
        fock += 5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fast_params() -> PhysicalParams {
        // Strong coupling / low quality factor so relaxation rates are large
        // and small truncations suffice; structure identical to the slow
        // experimental regime.
        PhysicalParams {
            nu: 0.5,
            quality: 100.0,
            gamma_a: 0.1,
            gamma_s: 1.9,
            gamma_phi: 0.0,
            eta: 0.05,
            omega: 4.0,
            lambda: 20.0,
            delta: 20.5,
            n_thermal: 2.0,
            fock_dim: 8,
        }
    }

    fn solve(p: &PhysicalParams) -> SteadyStateResult {
        let space = p.space().unwrap();
        let h = build_hamiltonian(p, &space).unwrap();
        let diss = build_dissipators(p, &space).unwrap();
        let l = vectorize(&h, &diss).unwrap();
        steady_state(&l).unwrap()
    }

    #[test]
    fn everything_decays_to_vacuum_without_drive_or_bath() {
        let mut p = fast_params();
        p.omega = 0.0;
        p.eta = 0.0;
        p.n_thermal = 0.0;
        let res = solve(&p);
        assert!(res.n_ss < 1e-9, "n_ss = {}", res.n_ss);
        assert!(res.p_ground > 1.0 - 1e-9);
        // ρ = |g⟩⟨g| ⊗ |0⟩⟨0|: the (g,0) diagonal entry is 1.
        assert_abs_diff_eq!(res.rho_ss[(0, 0)].re, 1.0, epsilon = 1e-9);
        assert!(res.residual <= 1e-8);
    }

    #[test]
    fn undriven_resonator_thermalizes_to_bath_occupation() {
        let mut p = fast_params();
        p.omega = 0.0;
        p.eta = 0.0;
        p.n_thermal = 3.0;
        p.fock_dim = 24;
        let space = p.space().unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let diss = build_dissipators(&p, &space).unwrap();
        let l = vectorize(&h, &diss).unwrap();
        let res = steady_state(&l).unwrap();
        // Detailed balance on the truncated ladder gives exactly the
        // renormalized geometric distribution, so the solver must match the
        // truncated thermal moments to solver precision, not just to
        // truncation error.
        let thermal = crate::operators::thermal_fock_state(&space, 3.0).unwrap();
        let n_trunc = expectation(&crate::operators::fock_number(&space), &thermal)
            .unwrap()
            .re;
        assert_abs_diff_eq!(res.n_ss, n_trunc, epsilon = 1e-8);
        assert_abs_diff_eq!(res.p_ground, thermal[(0, 0)].re, epsilon = 1e-8);
        // Truncation error itself is small at this depth.
        assert_abs_diff_eq!(res.n_ss, 3.0, epsilon = 0.05);
        assert!(res.min_eigenvalue > -1e-12);
    }

    #[test]
    fn steady_state_is_normalized_and_hermitian() {
        let res = solve(&fast_params());
        assert_abs_diff_eq!(trace(&res.rho_ss).re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(trace(&res.rho_ss).im, 0.0, epsilon = 1e-12);
        let defect = (&res.rho_ss - res.rho_ss.adjoint()).norm();
        assert!(defect < 1e-10, "hermiticity defect {defect}");
        assert!(res.residual <= 1e-8);
        assert!(res.min_eigenvalue > -1e-6);
        assert!(res.n_ss >= 0.0);
        assert!(res.p_ground >= 0.0 && res.p_ground <= 1.0 + 1e-8);
    }

    #[test]
    fn rejects_non_composite_dimension() {
        let space = HilbertSpace::new(3).unwrap();
        let b = crate::operators::fock_annihilation(&space);
        let l = vectorize(
            &OperatorMatrix::zeros(3, 3),
            &[crate::model::DissipatorSpec::standard(1.0, b)],
        )
        .unwrap();
        assert!(matches!(
            steady_state(&l),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn degenerate_model_is_detected() {
        // A collapse operator acting on |e⟩ only, with |a⟩ and |s⟩ dark:
        // every mixture of the dark states is steady.
        let space = HilbertSpace::new(2).unwrap();
        use crate::hilbert::Collective::*;
        let jump = crate::operators::collective_projector(&space, Ground, Excited);
        let h = OperatorMatrix::zeros(space.total_dim(), space.total_dim());
        let l = vectorize(&h, &[crate::model::DissipatorSpec::standard(1.0, jump)]).unwrap();
        let err = steady_state(&l).unwrap_err();
        assert!(
            matches!(err, Error::DegenerateSteadyState(_)),
            "unexpected error {err:?}"
        );
    }

    #[test]
    fn healthy_model_passes_degeneracy_check() {
        let opts = SolverOptions {
            check_degeneracy: true,
            ..Default::default()
        };
        let p = fast_params();
        let space = p.space().unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let diss = build_dissipators(&p, &space).unwrap();
        let l = vectorize(&h, &diss).unwrap();
        let res = steady_state_with(&l, &opts).unwrap();
        assert!(res.residual <= 1e-8);
    }

    #[test]
    fn truncation_growth_converges_in_cooled_regime() {
        // The experimental cooling regime concentrates the state near the
        // vacuum, so the growth loop should stop after the first confirming
        // enlargement rather than run to the ceiling.
        let mut p = PhysicalParams::default()
            .with_subradiant_width(0.05)
            .on_red_sideband();
        p.fock_dim = 4;
        let res = converged_nss(&p).unwrap();
        assert!(res.converged);
        assert!((4..=14).contains(&res.fock_dim_used));
        assert!(res.n_ss > 0.0 && res.n_ss < 0.06, "n_ss = {}", res.n_ss);
    }

    #[test]
    fn truncation_failure_reports_sequence() {
        // A hot resonator whose thermal tail cannot fit below the ceiling.
        let mut p = fast_params();
        p.omega = 0.0;
        p.eta = 0.0;
        p.n_thermal = 30.0;
        p.fock_dim = 5;
        let opts = SolverOptions {
            fock_dim_max: 20,
            ..Default::default()
        };
        match converged_nss_with(&p, &opts) {
            Err(Error::TruncationNotConverged {
                fock_dim_max,
                sequence,
            }) => {
                assert_eq!(fock_dim_max, 20);
                assert!(sequence.len() >= 2);
                // Larger truncations capture more of the thermal tail.
                assert!(sequence.windows(2).all(|w| w[1] > w[0]));
            }
            other => panic!("expected truncation failure, got {other:?}"),
        }
    }
}
