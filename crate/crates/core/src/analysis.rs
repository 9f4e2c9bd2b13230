//! Parameter sweeps, decomposition of the final phonon number into bath and
//! drive-scattering contributions, and fitting the two-coefficient cooling
//! limit
//!
//! ```text
//! n_ss ≈ C · Γ_a ν N_i / ((ηΩ)² Q)  +  G · (Γ_a / 4ν)²
//! ```
//!
//! The split is operational: the scattering part is the phonon number left
//! when the bath occupation is set to zero, and the environmental part is the
//! remainder. Linearity in N_i (tested separately) makes this well defined.

use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::steady::{converged_nss_with, SolverOptions, SteadyStateResult};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Omega,
    GammaA,
    Nu,
    NThermal,
    Quality,
    Eta,
    GammaPhi,
    Delta,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 8] = [
        SweepAxis::Omega,
        SweepAxis::GammaA,
        SweepAxis::Nu,
        SweepAxis::NThermal,
        SweepAxis::Quality,
        SweepAxis::Eta,
        SweepAxis::GammaPhi,
        SweepAxis::Delta,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::Omega => "Omega",
            SweepAxis::GammaA => "Gamma_a",
            SweepAxis::Nu => "nu",
            SweepAxis::NThermal => "N_i",
            SweepAxis::Quality => "Q",
            SweepAxis::Eta => "eta",
            SweepAxis::GammaPhi => "Gamma_phi",
            SweepAxis::Delta => "Delta",
        }
    }

    /// Replaces the swept field on a copy of `base`. Two side effects keep
    /// the point physical: sweeping the subradiant width preserves the
    /// Γ_a + Γ_s = 2 link if (and only if) the base obeys it, and
    /// `link_delta` recomputes the red-sideband detuning Δ = ν + Λ after the
    /// swept value lands.
    pub fn apply(self, base: &PhysicalParams, value: f64, link_delta: bool) -> PhysicalParams {
        let mut p = base.clone();
        match self {
            SweepAxis::Omega => p.omega = value,
            SweepAxis::GammaA => {
                let linked = p.widths_sum_to_two_gamma();
                p.gamma_a = value;
                if linked {
                    p.gamma_s = 2.0 - value;
                }
            }
            SweepAxis::Nu => p.nu = value,
            SweepAxis::NThermal => p.n_thermal = value,
            SweepAxis::Quality => p.quality = value,
            SweepAxis::Eta => p.eta = value,
            SweepAxis::GammaPhi => p.gamma_phi = value,
            SweepAxis::Delta => p.delta = value,
        }
        if link_delta {
            p.delta = p.red_sideband_detuning();
        }
        p
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown sweep axis {s:?}; expected one of {}",
                    SweepAxis::ALL.map(|a| a.label()).join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub base: PhysicalParams,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Recompute Δ = ν + Λ at every point (the cooling configuration when
    /// sweeping ν).
    pub link_delta_to_sideband: bool,
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub axis_value: f64,
    pub n_ss: f64,
    pub n_env: f64,
    pub n_scatter: f64,
    pub p_ground: f64,
    pub residual: f64,
    pub fock_dim_used: usize,
    pub converged: bool,
}

impl SweepRow {
    fn failed(axis_value: f64) -> Self {
        Self {
            axis_value,
            n_ss: f64::NAN,
            n_env: f64::NAN,
            n_scatter: f64::NAN,
            p_ground: f64::NAN,
            residual: f64::NAN,
            fock_dim_used: 0,
            converged: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub base: PhysicalParams,
    pub link_delta_to_sideband: bool,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Parameters at one row, reconstructed exactly as the sweep built them.
    pub fn params_at(&self, row: &SweepRow) -> PhysicalParams {
        self.axis
            .apply(&self.base, row.axis_value, self.link_delta_to_sideband)
    }

    /// Copy containing only rows with axis value inside `[min, max]` — the
    /// way a fit window is expressed.
    pub fn restricted(&self, min: f64, max: f64) -> SweepResult {
        SweepResult {
            axis: self.axis,
            base: self.base.clone(),
            link_delta_to_sideband: self.link_delta_to_sideband,
            rows: self
                .rows
                .iter()
                .filter(|r| r.axis_value >= min && r.axis_value <= max)
                .cloned()
                .collect(),
        }
    }
}

/// Runs the sweep with default solver options. Points are solved in
/// parallel; rows come back in the order of `spec.values` and each point's
/// arithmetic is independent of scheduling, so results are reproducible.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(spec, &SolverOptions::default())
}

pub fn run_sweep_with(spec: &SweepSpec, opts: &SolverOptions) -> Result<SweepResult> {
    if spec.values.is_empty() {
        return Err(Error::InvalidParameter("sweep has no points".into()));
    }
    if spec.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "sweep values must all be finite".into(),
        ));
    }
    if spec.axis == SweepAxis::Delta && spec.link_delta_to_sideband {
        return Err(Error::InvalidParameter(
            "sweeping Delta while relinking it to the sideband is contradictory".into(),
        ));
    }

    let rows: Vec<SweepRow> = spec
        .values
        .par_iter()
        .map(|&value| sweep_point(spec, value, opts))
        .collect();

    Ok(SweepResult {
        axis: spec.axis,
        base: spec.base.clone(),
        link_delta_to_sideband: spec.link_delta_to_sideband,
        rows,
    })
}

fn sweep_point(spec: &SweepSpec, value: f64, opts: &SolverOptions) -> SweepRow {
    let p = spec.axis.apply(&spec.base, value, spec.link_delta_to_sideband);
    let total = match converged_nss_with(&p, opts) {
        Ok(res) => res,
        Err(Error::TruncationNotConverged { sequence, .. }) => {
            // Keep the best estimate, flagged as unconverged.
            let mut row = SweepRow::failed(value);
            row.n_ss = sequence.last().copied().unwrap_or(f64::NAN);
            row.fock_dim_used = opts.fock_dim_max;
            return row;
        }
        Err(_) => return SweepRow::failed(value),
    };

    let (n_env, n_scatter, split_ok) = if p.n_thermal == 0.0 {
        (0.0, total.n_ss, true)
    } else {
        let p0 = PhysicalParams {
            n_thermal: 0.0,
            ..p.clone()
        };
        match converged_nss_with(&p0, opts) {
            Ok(scatter) => {
                let raw_env = total.n_ss - scatter.n_ss;
                if raw_env >= -1e-6 {
                    (raw_env.max(0.0), scatter.n_ss, true)
                } else {
                    // Decomposition inconsistent beyond round-off; keep the
                    // raw numbers but flag the row.
                    (raw_env, scatter.n_ss, false)
                }
            }
            Err(_) => (f64::NAN, f64::NAN, false),
        }
    };

    SweepRow {
        axis_value: value,
        n_ss: total.n_ss,
        n_env,
        n_scatter,
        p_ground: total.p_ground,
        residual: total.residual,
        fock_dim_used: total.fock_dim_used,
        converged: total.converged && split_ok,
    }
}

/// `(n_env, n_scatter)` at a single parameter point: the scattering part is
/// the zero-bath phonon number, the environmental part the remainder
/// (clamped at 0 against round-off no worse than 10⁻⁶).
pub fn split_contributions(p: &PhysicalParams) -> Result<(f64, f64)> {
    split_contributions_with(p, &SolverOptions::default())
}

pub fn split_contributions_with(
    p: &PhysicalParams,
    opts: &SolverOptions,
) -> Result<(f64, f64)> {
    if p.n_thermal <= 0.0 {
        return Err(Error::InvalidParameter(
            "contribution split needs a nonzero bath occupation".into(),
        ));
    }
    let total = converged_nss_with(p, opts)?;
    let p0 = PhysicalParams {
        n_thermal: 0.0,
        ..p.clone()
    };
    let scatter = converged_nss_with(&p0, opts)?;
    let raw_env = total.n_ss - scatter.n_ss;
    if raw_env < -1e-6 {
        return Err(Error::Numerical(format!(
            "environmental contribution {raw_env:.3e} is negative beyond tolerance"
        )));
    }
    Ok((raw_env.max(0.0), scatter.n_ss))
}

/// Convenience wrapper: solve one point with truncation growth. Re-exported
/// here so sweep callers can cross-check single points.
pub fn solve_point_converged(p: &PhysicalParams, opts: &SolverOptions) -> Result<SteadyStateResult> {
    converged_nss_with(p, opts)
}

/// `C·Γ_a·ν·N_i/((ηΩ)²·Q) + G·(Γ_a/(4ν))²` — the closed-form cooling limit
/// with fitted coefficients.
pub fn eval_cooling_formula(p: &PhysicalParams, c: f64, g: f64) -> Result<f64> {
    if !(c > 0.0 && g > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "coefficients must be positive, got C = {c}, G = {g}"
        )));
    }
    let drive = p.eta * p.omega;
    if drive == 0.0 {
        return Err(Error::UndefinedFormula(
            "cooling formula diverges at eta·Omega = 0".into(),
        ));
    }
    let env = c * p.gamma_a * p.nu * p.n_thermal / (drive * drive * p.quality);
    let scatter = g * (p.gamma_a / (4.0 * p.nu)).powi(2);
    Ok(env + scatter)
}

/// Frequency minimizing the cooling limit at fixed couplings:
/// `ν_opt = (η²Ω²·Q·Γ_a·G / (8·C·N_i))^{1/3}`.
pub fn nu_opt(p: &PhysicalParams, c: f64, g: f64) -> Result<f64> {
    if !(c > 0.0 && g > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "coefficients must be positive, got C = {c}, G = {g}"
        )));
    }
    if p.eta * p.omega == 0.0 || p.n_thermal == 0.0 {
        return Err(Error::UndefinedFormula(
            "optimal frequency needs eta·Omega > 0 and a nonzero bath occupation".into(),
        ));
    }
    Ok(
        (p.eta * p.eta * p.omega * p.omega * p.quality * p.gamma_a * g
            / (8.0 * c * p.n_thermal))
            .cbrt(),
    )
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub c: f64,
    pub g: f64,
    /// RMS of (formula − n_ss)/n_ss over the rows used.
    pub rms_relative_error: f64,
    /// Human-readable description of the fitted window.
    pub domain_of_validity: String,
}

/// Least-squares fit of the two formula coefficients, each against its own
/// contribution: C from the environmental rows, G from the scattering rows.
/// Both are single-parameter linear fits (`coef = Σxy / Σx²`). Callers choose
/// the validity window by restricting the sweeps first (see
/// [`SweepResult::restricted`]).
pub fn fit_cg(sweeps: &[SweepResult]) -> Result<FitResult> {
    let mut env: Vec<(f64, f64)> = Vec::new();
    let mut scatter: Vec<(f64, f64)> = Vec::new();
    let mut totals: Vec<(f64, f64, f64)> = Vec::new();
    let mut described = Vec::new();

    for sweep in sweeps {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut used = 0usize;
        for row in &sweep.rows {
            if !row.converged || !row.n_ss.is_finite() {
                continue;
            }
            let p = sweep.params_at(row);
            let drive = p.eta * p.omega;
            if drive == 0.0 || p.quality <= 0.0 || p.nu <= 0.0 {
                continue;
            }
            let x = p.gamma_a * p.nu * p.n_thermal / (drive * drive * p.quality);
            let z = (p.gamma_a / (4.0 * p.nu)).powi(2);
            let mut contributed = false;
            if x > 0.0 && row.n_env.is_finite() && row.n_env >= 0.0 {
                env.push((x, row.n_env));
                contributed = true;
            }
            if z > 0.0 && row.n_scatter.is_finite() && row.n_scatter >= 0.0 {
                scatter.push((z, row.n_scatter));
                contributed = true;
            }
            if x > 0.0 && z > 0.0 && row.n_ss > 0.0 {
                totals.push((x, z, row.n_ss));
            }
            if contributed {
                used += 1;
                lo = lo.min(row.axis_value);
                hi = hi.max(row.axis_value);
            }
        }
        if used > 0 {
            described.push(format!(
                "{} in [{lo}, {hi}] ({used} rows)",
                sweep.axis.label()
            ));
        }
    }

    if env.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 environmental rows to fit C, got {}",
            env.len()
        )));
    }
    if scatter.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 scattering rows to fit G, got {}",
            scatter.len()
        )));
    }

    let single = |pts: &[(f64, f64)]| -> f64 {
        let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
        sxy / sxx
    };
    let c = single(&env);
    let g = single(&scatter);
    if !(c > 0.0) || !(g > 0.0) {
        return Err(Error::Numerical(format!(
            "fit produced non-positive coefficients (C = {c:.3e}, G = {g:.3e}); \
             the data lie outside the formula's validity"
        )));
    }

    let rms_relative_error = if totals.is_empty() {
        f64::NAN
    } else {
        (totals
            .iter()
            .map(|&(x, z, n)| ((c * x + g * z - n) / n).powi(2))
            .sum::<f64>()
            / totals.len() as f64)
            .sqrt()
    };

    Ok(FitResult {
        c,
        g,
        rms_relative_error,
        domain_of_validity: described.join("; "),
    })
}
