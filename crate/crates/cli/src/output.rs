//! CSV emission and re-ingestion. Every file starts with `#` comment lines
//! carrying the complete resolved parameter set (defaults included), so a
//! sweep CSV is self-describing and can be fed back into the fit command.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use dicke_cooling::{
    EvolutionTrajectory, PhysicalParams, SweepAxis, SweepResult, SweepRow,
};

use crate::config::{CliError, CliResult, RunConfig};

pub const SWEEP_HEADER: &str = "axis,value,n_ss,n_env,n_scatter,p_ground,residual,fock_dim,converged";
pub const EVOLVE_HEADER: &str = "t,n,trace_error";
pub const FIT_HEADER: &str = "axis,value,n_ss,n_env,n_scatter,formula";

/// Ordered `key = value` metadata block rendered as `#` comment lines.
pub struct MetaBlock {
    lines: Vec<(String, String)>,
}

impl MetaBlock {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        let mut m = MetaBlock { lines: Vec::new() };
        m.push("command", command);
        let mut defaulted = Vec::new();
        if cfg.gamma_s_defaulted {
            defaulted.push("Gamma_s");
        }
        if cfg.delta_defaulted {
            defaulted.push("delta");
        }
        m.push(
            "defaulted",
            if defaulted.is_empty() {
                "none".to_string()
            } else {
                defaulted.join(", ")
            },
        );
        let p = &cfg.params;
        m.push("nu", p.nu);
        m.push("Q", p.quality);
        m.push("Gamma_a", p.gamma_a);
        m.push("Gamma_s", p.gamma_s);
        m.push("Gamma_phi", p.gamma_phi);
        m.push("eta", p.eta);
        m.push("Omega", p.omega);
        m.push("Lambda", p.lambda);
        m.push("N_i", p.n_thermal);
        m.push("delta", p.delta);
        m.push("fock_dim", p.fock_dim);
        m.push("fock_dim_max", cfg.solver.fock_dim_max);
        m.push("residual_tol", cfg.solver.residual_tol);
        if let Some(note) = &cfg.metadata {
            m.push("metadata", note);
        }
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> String {
        let mut out = String::from("# resonator-cooling simulator output\n");
        for (k, v) in &self.lines {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn push_sweep_row(out: &mut String, axis: &str, value: f64, r: &SweepRow) {
    let _ = writeln!(
        out,
        "{axis},{value},{},{},{},{},{},{},{}",
        r.n_ss, r.n_env, r.n_scatter, r.p_ground, r.residual, r.fock_dim_used, r.converged
    );
}

pub fn write_sweep_csv(path: &Path, sweep: &SweepResult, meta: &MetaBlock) -> CliResult<()> {
    let mut out = meta.render();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    let axis = sweep.axis.label();
    for r in &sweep.rows {
        push_sweep_row(&mut out, axis, r.axis_value, r);
    }
    write_file(path, &out)
}

/// One-row variant used by the steady command; the row carries no sweep axis.
pub fn write_point_csv(path: &Path, row: &SweepRow, meta: &MetaBlock) -> CliResult<()> {
    let mut out = meta.render();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    push_sweep_row(&mut out, "none", 0.0, row);
    write_file(path, &out)
}

pub fn write_evolve_csv(
    path: &Path,
    traj: &EvolutionTrajectory,
    meta: &MetaBlock,
) -> CliResult<()> {
    let mut out = meta.render();
    out.push_str(EVOLVE_HEADER);
    out.push('\n');
    for ((t, n), err) in traj
        .times
        .iter()
        .zip(&traj.n_of_t)
        .zip(&traj.trace_error)
    {
        let _ = writeln!(out, "{t},{n},{err}");
    }
    write_file(path, &out)
}

/// Windowed sweep rows together with the fitted-formula prediction.
pub fn write_fit_csv(
    path: &Path,
    sweep: &SweepResult,
    formula: &[f64],
    meta: &MetaBlock,
) -> CliResult<()> {
    let mut out = meta.render();
    out.push_str(FIT_HEADER);
    out.push('\n');
    let axis = sweep.axis.label();
    for (r, f) in sweep.rows.iter().zip(formula) {
        let _ = writeln!(
            out,
            "{axis},{},{},{},{},{f}",
            r.axis_value, r.n_ss, r.n_env, r.n_scatter
        );
    }
    write_file(path, &out)
}

/// Reads a sweep CSV produced by [`write_sweep_csv`], reconstructing the
/// swept axis, the base parameters, and every row from the metadata block.
pub fn read_sweep_csv(path: &Path) -> CliResult<SweepResult> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut meta = std::collections::HashMap::new();
    let mut rows = Vec::new();
    let mut header_seen = false;
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if line != SWEEP_HEADER {
                return Err(CliError::fit_data(format!(
                    "{}: unexpected header {line:?}; this is not a sweep CSV",
                    path.display()
                )));
            }
            header_seen = true;
            continue;
        }
        rows.push(parse_row(line, path)?);
    }
    if !header_seen {
        return Err(CliError::fit_data(format!(
            "{}: no header row found",
            path.display()
        )));
    }

    let get = |key: &str| -> CliResult<f64> {
        meta.get(key)
            .ok_or_else(|| {
                CliError::fit_data(format!("{}: metadata key {key} missing", path.display()))
            })?
            .parse::<f64>()
            .map_err(|e| CliError::fit_data(format!("{}: metadata key {key}: {e}", path.display())))
    };
    let axis_name = meta
        .get("axis")
        .ok_or_else(|| CliError::fit_data(format!("{}: no sweep axis recorded", path.display())))?;
    let axis = SweepAxis::from_str(axis_name)
        .map_err(|e| CliError::fit_data(format!("{}: {e}", path.display())))?;
    let base = PhysicalParams {
        nu: get("nu")?,
        quality: get("Q")?,
        gamma_a: get("Gamma_a")?,
        gamma_s: get("Gamma_s")?,
        gamma_phi: get("Gamma_phi")?,
        eta: get("eta")?,
        omega: get("Omega")?,
        lambda: get("Lambda")?,
        delta: get("delta")?,
        n_thermal: get("N_i")?,
        fock_dim: get("fock_dim")? as usize,
    };
    let link = meta
        .get("link_delta_to_sideband")
        .map(|v| v == "true")
        .unwrap_or(false);
    Ok(SweepResult {
        axis,
        base,
        link_delta_to_sideband: link,
        rows,
    })
}

fn parse_row(line: &str, path: &Path) -> CliResult<SweepRow> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 9 {
        return Err(CliError::fit_data(format!(
            "{}: malformed row {line:?}",
            path.display()
        )));
    }
    let num = |s: &str| -> CliResult<f64> {
        s.parse::<f64>()
            .map_err(|e| CliError::fit_data(format!("{}: bad number {s:?}: {e}", path.display())))
    };
    Ok(SweepRow {
        axis_value: num(fields[1])?,
        n_ss: num(fields[2])?,
        n_env: num(fields[3])?,
        n_scatter: num(fields[4])?,
        p_ground: num(fields[5])?,
        residual: num(fields[6])?,
        fock_dim_used: fields[7].parse::<usize>().map_err(|e| {
            CliError::fit_data(format!("{}: bad fock_dim {:?}: {e}", path.display(), fields[7]))
        })?,
        converged: fields[8] == "true",
    })
}
