//! Time evolution of the vectorized master equation, used as an independent
//! cross-check on the steady-state solver.
//!
//! The integrator is an adaptive Dormand-Prince 5(4) pair with the classic
//! step controller. The generator is applied through sparse matrix-vector
//! products, so a step costs six of those (plus one reused across steps).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::liouvillian::{unvec_density, vec_density, Superoperator};
use crate::operators::{resonator_number, trace, OperatorMatrix};

// The generator is autonomous, so the stage times of the tableau never enter;
// only the stage weights do.
const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
    &[
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (row 7 of the tableau; the sixth stage lands on them,
/// giving the first-same-as-last property).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Observable recorded along the trajectory. Defaults to the resonator
    /// phonon number on the composite layout; supply one explicitly for
    /// generators on other spaces.
    pub observable: Option<OperatorMatrix>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_steps: 2_000_000,
            observable: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionTrajectory {
    /// Accepted step times, strictly increasing, in units of 1/γ.
    pub times: Vec<f64>,
    /// Observable expectation value at each time.
    pub n_of_t: Vec<f64>,
    /// |tr ρ(t) − 1| at each time.
    pub trace_error: Vec<f64>,
    /// Density matrix at the last accepted time, for direct comparison with
    /// states obtained by other means.
    pub final_rho: OperatorMatrix,
}

impl EvolutionTrajectory {
    pub fn final_n(&self) -> f64 {
        *self.n_of_t.last().expect("trajectory has at least one point")
    }
}

fn observable_entries(obs: &OperatorMatrix, d: usize) -> Vec<(usize, Complex64)> {
    // tr(Oρ) = Σ_ij O_ij ρ_ji, and ρ_ji sits at slot i·d + j of vec(ρ).
    let mut entries = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let v = obs[(i, j)];
            if v != Complex64::new(0.0, 0.0) {
                entries.push((i * d + j, v));
            }
        }
    }
    entries
}

fn expect_from_vec(entries: &[(usize, Complex64)], y: &[Complex64]) -> f64 {
    entries
        .iter()
        .map(|&(idx, v)| v * y[idx])
        .sum::<Complex64>()
        .re
}

fn trace_from_vec(y: &[Complex64], d: usize) -> Complex64 {
    (0..d).map(|j| y[j * d + j]).sum()
}

/// Integrates `d vec(ρ)/dt = 𝓛 vec(ρ)` from `rho0` to `t_final`, recording
/// the observable and the trace drift at every accepted step.
pub fn time_evolve(
    l: &Superoperator,
    rho0: &OperatorMatrix,
    t_final: f64,
    opts: &EvolveOptions,
) -> Result<EvolutionTrajectory> {
    let d = l.dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "initial state is {}x{}, generator acts on {d}x{d}",
            rho0.nrows(),
            rho0.ncols()
        )));
    }
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "t_final must be finite and >= 0, got {t_final}"
        )));
    }
    let tr0 = trace(rho0);
    if (tr0 - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "initial state must have unit trace, got {tr0}"
        )));
    }
    if (rho0 - rho0.adjoint()).norm() > 1e-8 {
        return Err(Error::InvalidParameter(
            "initial state must be Hermitian".into(),
        ));
    }
    let obs = match &opts.observable {
        Some(o) => {
            if o.nrows() != d || o.ncols() != d {
                return Err(Error::DimensionMismatch(
                    "observable dimension does not match the generator".into(),
                ));
            }
            o.clone()
        }
        None => {
            if d % 4 != 0 {
                return Err(Error::InvalidDimension(format!(
                    "default observable needs the composite layout (dim divisible by 4), got {d}"
                )));
            }
            resonator_number(&HilbertSpace::new(d / 4)?)
        }
    };
    let entries = observable_entries(&obs, d);

    let n = l.superdim();
    let mut y = vec_density(rho0);
    let mut trajectory = EvolutionTrajectory {
        times: vec![0.0],
        n_of_t: vec![expect_from_vec(&entries, &y)],
        trace_error: vec![(trace_from_vec(&y, d) - Complex64::new(1.0, 0.0)).norm()],
        final_rho: rho0.clone(),
    };
    if t_final == 0.0 {
        return Ok(trajectory);
    }

    let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![Complex64::new(0.0, 0.0); n]).collect();
    let mut stage = vec![Complex64::new(0.0, 0.0); n];
    let mut y_new = vec![Complex64::new(0.0, 0.0); n];

    l.apply_slice(&y, &mut k[0]);

    // Starting step from the magnitude of the initial derivative.
    let weighted = |v: &[Complex64], reference: &[Complex64]| -> f64 {
        (v.iter()
            .zip(reference)
            .map(|(e, r)| {
                let scale = opts.atol + opts.rtol * r.norm();
                (e.norm() / scale).powi(2)
            })
            .sum::<f64>()
            / n as f64)
            .sqrt()
    };
    let d0 = weighted(&y, &y);
    let d1 = weighted(&k[0], &y);
    let mut h = if d0 > 1e-10 && d1 > 1e-10 {
        (0.01 * d0 / d1).min(t_final)
    } else {
        (1e-6f64).min(t_final)
    };

    let mut t = 0.0;
    let mut steps = 0usize;
    while t < t_final {
        if steps >= opts.max_steps {
            return Err(Error::Integration(format!(
                "step budget {} exhausted at t = {t:.6e} of {t_final:.6e}",
                opts.max_steps
            )));
        }
        steps += 1;
        h = h.min(t_final - t);
        if h < 1e-14 * t_final.max(1.0) {
            return Err(Error::Integration(format!(
                "step size underflow at t = {t:.6e} (h = {h:.3e})"
            )));
        }

        for s in 1..7 {
            for (i, sv) in stage.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &aj) in A[s - 1].iter().enumerate() {
                    if aj != 0.0 {
                        acc += Complex64::new(aj, 0.0) * k[j][i];
                    }
                }
                *sv = y[i] + Complex64::new(h, 0.0) * acc;
            }
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
            l.apply_slice(&stage, &mut k[s]);
        }

        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = Complex64::new(0.0, 0.0);
            for j in 0..7 {
                let w = B5[j] - B4[j];
                if w != 0.0 {
                    e += Complex64::new(w, 0.0) * k[j][i];
                }
            }
            let e = e * Complex64::new(h, 0.0);
            let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / scale).powi(2);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut y_new);
            // First-same-as-last: the seventh stage is the derivative at the
            // accepted point.
            k.swap(0, 6);
            trajectory.times.push(t);
            trajectory.n_of_t.push(expect_from_vec(&entries, &y));
            trajectory
                .trace_error
                .push((trace_from_vec(&y, d) - Complex64::new(1.0, 0.0)).norm());
        }
        let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h *= factor;
    }
    trajectory.final_rho = unvec_density(&y)?;
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::vectorize;
    use crate::model::DissipatorSpec;
    use crate::operators::{fock_annihilation, fock_number};
    use approx::assert_abs_diff_eq;

    fn lossy_mode(kappa: f64, fock_dim: usize) -> (Superoperator, OperatorMatrix) {
        let space = HilbertSpace::new(fock_dim).unwrap();
        let b = fock_annihilation(&space);
        let h = OperatorMatrix::zeros(fock_dim, fock_dim);
        let l = vectorize(&h, &[DissipatorSpec::standard(kappa, b)]).unwrap();
        (l, fock_number(&space))
    }

    #[test]
    fn pure_loss_decays_exponentially() {
        let kappa = 0.8;
        let (l, number) = lossy_mode(kappa, 4);
        let mut rho0 = OperatorMatrix::zeros(4, 4);
        rho0[(1, 1)] = Complex64::new(1.0, 0.0);
        let opts = EvolveOptions {
            observable: Some(number),
            ..Default::default()
        };
        let traj = time_evolve(&l, &rho0, 6.0, &opts).unwrap();
        assert!(traj.times.len() > 3);
        for (t, n) in traj.times.iter().zip(&traj.n_of_t) {
            assert_abs_diff_eq!(*n, (-kappa * t).exp(), epsilon = 1e-6);
        }
        for e in &traj.trace_error {
            assert!(*e < 1e-7, "trace drift {e}");
        }
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert_abs_diff_eq!(traj.final_rho[(1, 1)].re, (-kappa * 6.0).exp(), epsilon = 1e-6);
        assert_abs_diff_eq!(traj.final_rho.trace().re, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn zero_time_returns_initial_point_only() {
        let (l, number) = lossy_mode(1.0, 3);
        let mut rho0 = OperatorMatrix::zeros(3, 3);
        rho0[(2, 2)] = Complex64::new(1.0, 0.0);
        let opts = EvolveOptions {
            observable: Some(number),
            ..Default::default()
        };
        let traj = time_evolve(&l, &rho0, 0.0, &opts).unwrap();
        assert_eq!(traj.times, vec![0.0]);
        assert_eq!(traj.n_of_t.len(), 1);
        assert_abs_diff_eq!(traj.n_of_t[0], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_invalid_initial_states() {
        let (l, number) = lossy_mode(1.0, 3);
        let opts = EvolveOptions {
            observable: Some(number),
            ..Default::default()
        };
        let mut not_normalized = OperatorMatrix::zeros(3, 3);
        not_normalized[(0, 0)] = Complex64::new(2.0, 0.0);
        assert!(time_evolve(&l, &not_normalized, 1.0, &opts).is_err());

        let mut not_hermitian = OperatorMatrix::zeros(3, 3);
        not_hermitian[(0, 0)] = Complex64::new(1.0, 0.0);
        not_hermitian[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(time_evolve(&l, &not_hermitian, 1.0, &opts).is_err());

        let mut rho0 = OperatorMatrix::zeros(3, 3);
        rho0[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(time_evolve(&l, &rho0, -1.0, &opts).is_err());
        assert!(time_evolve(&l, &rho0, f64::NAN, &opts).is_err());
    }

    #[test]
    fn default_observable_requires_composite_layout() {
        let (l, _) = lossy_mode(1.0, 3);
        let mut rho0 = OperatorMatrix::zeros(3, 3);
        rho0[(0, 0)] = Complex64::new(1.0, 0.0);
        let opts = EvolveOptions::default();
        assert!(matches!(
            time_evolve(&l, &rho0, 1.0, &opts),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn coherent_drive_conserves_trace_tightly() {
        // Unitary-only evolution (no dissipators): a two-level Rabi problem
        // embedded in a 2-level Fock space with H = x̂-like coupling.
        let space = HilbertSpace::new(2).unwrap();
        let b = fock_annihilation(&space);
        let h = (&b + b.adjoint()) * Complex64::new(0.7, 0.0);
        let l = vectorize(&h, &[]).unwrap();
        let mut rho0 = OperatorMatrix::zeros(2, 2);
        rho0[(0, 0)] = Complex64::new(1.0, 0.0);
        let opts = EvolveOptions {
            observable: Some(fock_number(&space)),
            ..Default::default()
        };
        let traj = time_evolve(&l, &rho0, 10.0, &opts).unwrap();
        // ⟨n⟩(t) = sin²(0.7 t) for resonant Rabi flopping at Ω_R = 2·0.7.
        for (t, nv) in traj.times.iter().zip(&traj.n_of_t) {
            assert_abs_diff_eq!(*nv, (0.7 * t).sin().powi(2), epsilon = 1e-6);
        }
    }
}
