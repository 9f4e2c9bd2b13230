//! Strict TOML run configuration: every key is validated up front and
//! unknown keys are hard errors, so a typo can never silently fall back to a
//! default.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dicke_cooling::{PhysicalParams, SolverOptions, SweepAxis};
use serde::Deserialize;

/// Error category; fixes both the exit code and the prefix of the
/// machine-readable line printed to standard error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    /// Configuration / validation problems (exit 1).
    Config,
    /// Solver or integrator failures (exit 2).
    Solver,
    /// Not enough usable data for a fit (exit 3).
    FitData,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Config => 1,
            Category::Solver => 2,
            Category::FitData => 3,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Config => "config",
            Category::Solver => "solver",
            Category::FitData => "fit-data",
        })
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            category: Category::Config,
            message: message.into(),
        }
    }

    pub fn solver(message: impl Into<String>) -> Self {
        Self {
            category: Category::Solver,
            message: message.into(),
        }
    }

    pub fn fit_data(message: impl Into<String>) -> Self {
        Self {
            category: Category::FitData,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.category, self.message)
    }
}

/// Maps library errors onto exit categories: anything that means "your input
/// was wrong" is config, shortage of fit rows is fit-data, the rest is the
/// solver's fault.
pub fn from_core(err: dicke_cooling::Error) -> CliError {
    use dicke_cooling::Error as E;
    let category = match &err {
        E::InvalidParameter(_) | E::InvalidDimension(_) | E::DimensionMismatch(_) => {
            Category::Config
        }
        E::InsufficientData(_) => Category::FitData,
        _ => Category::Solver,
    };
    CliError {
        category,
        message: err.to_string(),
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: RawParams,
    #[serde(default)]
    solver: RawSolver,
    sweep: Option<RawSweep>,
    fit: Option<RawFit>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    nu: f64,
    #[serde(rename = "Q")]
    quality: f64,
    #[serde(rename = "Gamma_a")]
    gamma_a: f64,
    #[serde(rename = "Gamma_s")]
    gamma_s: Option<f64>,
    #[serde(rename = "Gamma_phi")]
    gamma_phi: f64,
    eta: f64,
    #[serde(rename = "Omega")]
    omega: f64,
    #[serde(rename = "Lambda")]
    lambda: f64,
    #[serde(rename = "N_i")]
    n_thermal: f64,
    fock_dim: usize,
    delta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    fock_dim_max: Option<usize>,
    residual_tol: Option<f64>,
    evolve_t_final: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: String,
    start: f64,
    stop: f64,
    points: usize,
    spacing: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFit {
    omega_window: Option<[f64; 2]>,
    input_csv: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    csv_path: Option<PathBuf>,
    plot_path: Option<PathBuf>,
    metadata: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub spacing: Spacing,
}

#[derive(Clone, Debug)]
pub struct FitPlan {
    /// Window on the swept axis; `None` keeps every row.
    pub window: Option<(f64, f64)>,
    pub input_csv: Option<PathBuf>,
}

/// Fully resolved configuration: physical parameters with every default
/// applied (and remembered, so outputs can echo them), solver options, and
/// the optional sweep/fit/output plans.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub solver: SolverOptions,
    pub evolve_t_final: Option<f64>,
    pub sweep: Option<SweepPlan>,
    pub fit: Option<FitPlan>,
    pub csv_path: Option<PathBuf>,
    pub plot_path: Option<PathBuf>,
    pub metadata: Option<String>,
    /// Γ_s was not given and defaulted to 2 − Γ_a.
    pub gamma_s_defaulted: bool,
    /// Δ was not given and defaulted to ν + Λ; sweeps then keep the drive on
    /// the red sideband as ν or Λ move.
    pub delta_defaulted: bool,
}

pub fn load(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawConfig = toml::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message())))?;

    let gamma_s_defaulted = raw.params.gamma_s.is_none();
    let delta_defaulted = raw.params.delta.is_none();
    let params = PhysicalParams {
        nu: raw.params.nu,
        quality: raw.params.quality,
        gamma_a: raw.params.gamma_a,
        gamma_s: raw.params.gamma_s.unwrap_or(2.0 - raw.params.gamma_a),
        gamma_phi: raw.params.gamma_phi,
        eta: raw.params.eta,
        omega: raw.params.omega,
        lambda: raw.params.lambda,
        delta: raw
            .params
            .delta
            .unwrap_or(raw.params.nu + raw.params.lambda),
        n_thermal: raw.params.n_thermal,
        fock_dim: raw.params.fock_dim,
    };
    params.validate().map_err(from_core)?;

    let defaults = SolverOptions::default();
    let solver = SolverOptions {
        fock_dim_max: raw.solver.fock_dim_max.unwrap_or(defaults.fock_dim_max),
        residual_tol: raw.solver.residual_tol.unwrap_or(defaults.residual_tol),
        ..defaults
    };
    if solver.fock_dim_max < params.fock_dim {
        return Err(CliError::config(format!(
            "fock_dim_max ({}) is below fock_dim ({})",
            solver.fock_dim_max, params.fock_dim
        )));
    }
    if !(solver.residual_tol > 0.0 && solver.residual_tol.is_finite()) {
        return Err(CliError::config(format!(
            "residual_tol must be positive and finite, got {}",
            solver.residual_tol
        )));
    }
    if let Some(t) = raw.solver.evolve_t_final {
        if !t.is_finite() || t < 0.0 {
            return Err(CliError::config(format!(
                "evolve_t_final must be finite and >= 0, got {t}"
            )));
        }
    }

    let sweep = raw.sweep.map(|s| resolve_sweep(&s)).transpose()?;
    let fit = raw
        .fit
        .map(|f| {
            if let Some([lo, hi]) = f.omega_window {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(CliError::config(format!(
                        "fit window [{lo}, {hi}] is not an ordered finite interval"
                    )));
                }
            }
            Ok(FitPlan {
                window: f.omega_window.map(|[lo, hi]| (lo, hi)),
                input_csv: f.input_csv,
            })
        })
        .transpose()?;

    Ok(RunConfig {
        params,
        solver,
        evolve_t_final: raw.solver.evolve_t_final,
        sweep,
        fit,
        csv_path: raw.output.csv_path,
        plot_path: raw.output.plot_path,
        metadata: raw.output.metadata,
        gamma_s_defaulted,
        delta_defaulted,
    })
}

fn resolve_sweep(raw: &RawSweep) -> CliResult<SweepPlan> {
    let axis = SweepAxis::from_str(&raw.axis).map_err(from_core)?;
    if raw.points == 0 {
        return Err(CliError::config("sweep needs at least one point"));
    }
    if !(raw.start.is_finite() && raw.stop.is_finite()) {
        return Err(CliError::config(format!(
            "sweep range [{}, {}] must be finite",
            raw.start, raw.stop
        )));
    }
    let spacing = match raw.spacing.as_deref() {
        None | Some("linear") => Spacing::Linear,
        Some("log") => Spacing::Log,
        Some(other) => {
            return Err(CliError::config(format!(
                "unknown sweep spacing {other:?}; expected \"linear\" or \"log\""
            )))
        }
    };
    if spacing == Spacing::Log && (raw.start <= 0.0 || raw.stop <= 0.0) {
        return Err(CliError::config(format!(
            "log spacing needs positive endpoints, got [{}, {}]",
            raw.start, raw.stop
        )));
    }
    let n = raw.points;
    let values: Vec<f64> = if n == 1 {
        vec![raw.start]
    } else {
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                match spacing {
                    Spacing::Linear => raw.start + f * (raw.stop - raw.start),
                    Spacing::Log => raw.start * (raw.stop / raw.start).powf(f),
                }
            })
            .collect()
    };
    Ok(SweepPlan {
        axis,
        values,
        spacing,
    })
}
