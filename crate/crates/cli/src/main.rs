//! Command-line front end: `steady`, `sweep`, `fit`, and `evolve` runs
//! driven by a TOML configuration, with CSV as the canonical output and
//! optional self-contained SVG plots.

mod config;
mod output;
mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dicke_cooling::{
    build_dissipators, build_hamiltonian, converged_nss_with, eval_cooling_formula, fit_cg,
    run_sweep_with, steady_state_with, thermal_fock_state, time_evolve, vectorize, EvolveOptions,
    OperatorMatrix, PhysicalParams, SweepResult, SweepRow, SweepSpec,
};
use num_complex::Complex64;

use config::{from_core, CliError, CliResult, RunConfig};
use output::MetaBlock;
use plot::Series;

#[derive(Parser)]
#[command(
    name = "dicke-cooling",
    version,
    about = "Steady-state sideband cooling of a resonator coupled to two flux qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the steady state at the configured parameter point
    Steady(RunArgs),
    /// Sweep one parameter axis and tabulate the phonon number
    Sweep(RunArgs),
    /// Fit the cooling-limit coefficients C and G to sweep data
    Fit(RunArgs),
    /// Integrate the master equation in time from a thermal initial state
    Evolve(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (overrides [output].csv_path)
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot path (overrides [output].plot_path)
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Worker threads for sweep points (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Echoed into output metadata; results never depend on it
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let (args, run): (&RunArgs, fn(&RunConfig, &RunArgs) -> CliResult<()>) = match &cli.command {
        Command::Steady(a) => (a, cmd_steady),
        Command::Sweep(a) => (a, cmd_sweep),
        Command::Fit(a) => (a, cmd_fit),
        Command::Evolve(a) => (a, cmd_evolve),
    };
    if let Some(n) = args.threads {
        // Only sweep-point parallelism; a failure to resize the pool is not
        // an error worth dying for.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let code = match config::load(&args.config).and_then(|cfg| run(&cfg, args)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.category.exit_code()
        }
    };
    std::process::exit(code);
}

fn csv_path(cfg: &RunConfig, args: &RunArgs) -> CliResult<PathBuf> {
    args.out
        .clone()
        .or_else(|| cfg.csv_path.clone())
        .ok_or_else(|| CliError::config("no CSV path: set [output].csv_path or pass --out"))
}

fn plot_path(cfg: &RunConfig, args: &RunArgs) -> Option<PathBuf> {
    args.plot.clone().or_else(|| cfg.plot_path.clone())
}

fn meta(command: &str, cfg: &RunConfig, args: &RunArgs) -> MetaBlock {
    let mut m = MetaBlock::new(command, cfg);
    if let Some(n) = args.threads {
        m.push("threads", n);
    }
    if let Some(s) = args.seed {
        m.push("seed", s);
    }
    m
}

fn write_plot(path: &PathBuf, svg: String) -> CliResult<()> {
    std::fs::write(path, svg)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn cmd_steady(cfg: &RunConfig, args: &RunArgs) -> CliResult<()> {
    let out = csv_path(cfg, args)?;
    let p = &cfg.params;
    let total = converged_nss_with(p, &cfg.solver).map_err(from_core)?;
    let (n_env, n_scatter) = if p.n_thermal == 0.0 {
        (0.0, total.n_ss)
    } else {
        let p0 = PhysicalParams {
            n_thermal: 0.0,
            ..p.clone()
        };
        let scatter = converged_nss_with(&p0, &cfg.solver).map_err(from_core)?;
        let raw_env = total.n_ss - scatter.n_ss;
        if raw_env < -1e-6 {
            return Err(CliError::solver(format!(
                "environmental contribution {raw_env:.3e} is negative beyond tolerance"
            )));
        }
        (raw_env.max(0.0), scatter.n_ss)
    };

    println!("n_ss = {}", total.n_ss);
    println!("n_env = {n_env}");
    println!("n_scatter = {n_scatter}");
    println!("p_ground = {}", total.p_ground);
    println!("residual = {:e}", total.residual);
    println!("fock_dim = {}", total.fock_dim_used);

    let row = SweepRow {
        axis_value: 0.0,
        n_ss: total.n_ss,
        n_env,
        n_scatter,
        p_ground: total.p_ground,
        residual: total.residual,
        fock_dim_used: total.fock_dim_used,
        converged: total.converged,
    };
    output::write_point_csv(&out, &row, &meta("steady", cfg, args))
}

fn sweep_spec(cfg: &RunConfig) -> CliResult<(SweepSpec, &'static str)> {
    let plan = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("this command needs a [sweep] section"))?;
    let spec = SweepSpec {
        base: cfg.params.clone(),
        axis: plan.axis,
        values: plan.values.clone(),
        link_delta_to_sideband: cfg.delta_defaulted,
    };
    let spacing = match plan.spacing {
        config::Spacing::Linear => "linear",
        config::Spacing::Log => "log",
    };
    Ok((spec, spacing))
}

fn run_configured_sweep(cfg: &RunConfig) -> CliResult<(SweepResult, &'static str)> {
    let (spec, spacing) = sweep_spec(cfg)?;
    let sweep = run_sweep_with(&spec, &cfg.solver).map_err(from_core)?;
    Ok((sweep, spacing))
}

fn sweep_meta(command: &str, cfg: &RunConfig, args: &RunArgs, sweep: &SweepResult, spacing: &str) -> MetaBlock {
    let mut m = meta(command, cfg, args);
    m.push("axis", sweep.axis.label());
    m.push("spacing", spacing);
    m.push("link_delta_to_sideband", sweep.link_delta_to_sideband);
    m
}

fn cmd_sweep(cfg: &RunConfig, args: &RunArgs) -> CliResult<()> {
    let out = csv_path(cfg, args)?;
    let (sweep, spacing) = run_configured_sweep(cfg)?;

    let converged = sweep.rows.iter().filter(|r| r.converged).count();
    let best = sweep
        .rows
        .iter()
        .filter(|r| r.n_ss.is_finite())
        .min_by(|a, b| a.n_ss.partial_cmp(&b.n_ss).unwrap());
    match best {
        Some(b) => println!(
            "swept {} over {} points ({} converged); minimum n_ss = {} at {} = {}",
            sweep.axis,
            sweep.rows.len(),
            converged,
            b.n_ss,
            sweep.axis,
            b.axis_value
        ),
        None => println!(
            "swept {} over {} points; no finite results",
            sweep.axis,
            sweep.rows.len()
        ),
    }

    output::write_sweep_csv(&out, &sweep, &sweep_meta("sweep", cfg, args, &sweep, spacing))?;

    if let Some(path) = plot_path(cfg, args) {
        let series = vec![
            Series {
                label: "n_ss".into(),
                points: sweep.rows.iter().map(|r| (r.axis_value, r.n_ss)).collect(),
                dashed: false,
            },
            Series {
                label: "n_env".into(),
                points: sweep.rows.iter().map(|r| (r.axis_value, r.n_env)).collect(),
                dashed: false,
            },
            Series {
                label: "n_scatter".into(),
                points: sweep
                    .rows
                    .iter()
                    .map(|r| (r.axis_value, r.n_scatter))
                    .collect(),
                dashed: false,
            },
        ];
        let svg = plot::render_line_plot(
            "Steady-state phonon number",
            sweep.axis.label(),
            "phonon number",
            spacing == "log",
            &series,
        );
        write_plot(&path, svg)?;
    }
    Ok(())
}

fn cmd_fit(cfg: &RunConfig, args: &RunArgs) -> CliResult<()> {
    let out = csv_path(cfg, args)?;
    let input = cfg.fit.as_ref().and_then(|f| f.input_csv.clone());
    let (sweep, spacing) = match input {
        Some(path) => (output::read_sweep_csv(&path)?, "from-csv"),
        None => run_configured_sweep(cfg)?,
    };
    let window = cfg.fit.as_ref().and_then(|f| f.window);
    let windowed = match window {
        Some((lo, hi)) => sweep.restricted(lo, hi),
        None => sweep.clone(),
    };
    let fit = fit_cg(std::slice::from_ref(&windowed)).map_err(from_core)?;

    let window_text = match window {
        Some((lo, hi)) => format!("[{lo}, {hi}]"),
        None => "full range".to_string(),
    };
    println!("C = {}", fit.c);
    println!("G = {}", fit.g);
    println!("rms_relative_error = {}", fit.rms_relative_error);
    println!("window = {window_text}");
    println!("domain: {}", fit.domain_of_validity);

    let formula: Vec<f64> = windowed
        .rows
        .iter()
        .map(|r| {
            eval_cooling_formula(&windowed.params_at(r), fit.c, fit.g).unwrap_or(f64::NAN)
        })
        .collect();

    let mut m = sweep_meta("fit", cfg, args, &windowed, spacing);
    m.push("window", &window_text);
    m.push("C", fit.c);
    m.push("G", fit.g);
    m.push("rms_relative_error", fit.rms_relative_error);
    output::write_fit_csv(&out, &windowed, &formula, &m)?;

    if let Some(path) = plot_path(cfg, args) {
        let series = vec![
            Series {
                label: "n_ss (numeric)".into(),
                points: windowed
                    .rows
                    .iter()
                    .map(|r| (r.axis_value, r.n_ss))
                    .collect(),
                dashed: false,
            },
            Series {
                label: "n_env (numeric)".into(),
                points: windowed
                    .rows
                    .iter()
                    .map(|r| (r.axis_value, r.n_env))
                    .collect(),
                dashed: false,
            },
            Series {
                label: "fitted formula".into(),
                points: windowed
                    .rows
                    .iter()
                    .zip(&formula)
                    .map(|(r, &f)| (r.axis_value, f))
                    .collect(),
                dashed: true,
            },
        ];
        let svg = plot::render_line_plot(
            "Cooling limit: numeric vs fitted formula",
            windowed.axis.label(),
            "phonon number",
            spacing == "log",
            &series,
        );
        write_plot(&path, svg)?;
    }
    Ok(())
}

fn cmd_evolve(cfg: &RunConfig, args: &RunArgs) -> CliResult<()> {
    let out = csv_path(cfg, args)?;
    let t_final = cfg.evolve_t_final.ok_or_else(|| {
        CliError::config("evolve needs [solver].evolve_t_final")
    })?;
    let p = &cfg.params;
    let space = p.space().map_err(from_core)?;
    let h = build_hamiltonian(p, &space).map_err(from_core)?;
    let diss = build_dissipators(p, &space).map_err(from_core)?;
    let l = vectorize(&h, &diss).map_err(from_core)?;

    // Initial state: both qubits in their collective ground state, resonator
    // thermal at the bath occupation (capped so the truncation can hold it).
    let n_init = p.n_thermal.min(p.fock_dim as f64 / 4.0);
    let thermal = thermal_fock_state(&space, n_init).map_err(from_core)?;
    let mut qubit = OperatorMatrix::zeros(4, 4);
    qubit[(0, 0)] = Complex64::new(1.0, 0.0);
    let rho0 = qubit.kronecker(&thermal);

    let traj = time_evolve(&l, &rho0, t_final, &EvolveOptions::default()).map_err(from_core)?;
    let steady = steady_state_with(&l, &cfg.solver).map_err(from_core)?;
    let final_n = traj.n_of_t.last().copied().unwrap_or(f64::NAN);
    println!("final n = {final_n} at t = {t_final}");
    println!("steady-state n_ss = {}", steady.n_ss);
    println!("difference = {:e}", (final_n - steady.n_ss).abs());

    let mut m = meta("evolve", cfg, args);
    m.push("t_final", t_final);
    m.push("initial_thermal_occupation", n_init);
    m.push("steady_n_ss", steady.n_ss);
    output::write_evolve_csv(&out, &traj, &m)?;

    if let Some(path) = plot_path(cfg, args) {
        let series = vec![
            Series {
                label: "n(t)".into(),
                points: traj
                    .times
                    .iter()
                    .zip(&traj.n_of_t)
                    .map(|(&t, &n)| (t, n))
                    .collect(),
                dashed: false,
            },
            Series {
                label: "steady n_ss".into(),
                points: vec![(0.0, steady.n_ss), (t_final, steady.n_ss)],
                dashed: true,
            },
        ];
        let svg = plot::render_line_plot(
            "Relaxation toward the cooled steady state",
            "t",
            "phonon number",
            false,
            &series,
        );
        write_plot(&path, svg)?;
    }
    Ok(())
}
