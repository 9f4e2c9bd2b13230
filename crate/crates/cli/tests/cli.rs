//! End-to-end runs of the compiled binary: exit codes, CSV shape,
//! determinism, and agreement between the subcommands.

use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_dicke-cooling");

struct Workspace {
    dir: PathBuf,
}

impl Workspace {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("cooling-cli-{}-{name}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Workspace { dir }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

impl Drop for Workspace {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.dir);
    }
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// The experimental cooling point; converges after one truncation growth
/// step, so every command finishes in seconds.
fn base_params() -> &'static str {
    r#"[params]
nu = 0.5
Q = 1e6
Gamma_a = 0.05
Gamma_phi = 0.0
eta = 0.003
Omega = 4.0
Lambda = 500.0
N_i = 400
fock_dim = 5
"#
}

fn data_rows(csv: &str) -> Vec<String> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty() && !l.starts_with("axis,") && !l.starts_with("t,"))
        .map(str::to_string)
        .collect()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn steady_reports_and_writes_csv() {
    let ws = Workspace::new("steady");
    let csv = ws.path("point.csv");
    let config = ws.file(
        "point.toml",
        &format!(
            "{}\n[output]\ncsv_path = {:?}\nmetadata = \"working point\"\n",
            base_params(),
            csv
        ),
    );
    let (code, stdout, _) = run(&["steady", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 0);
    for key in ["n_ss = ", "p_ground = ", "residual = ", "fock_dim = "] {
        assert!(stdout.contains(key), "missing {key} in {stdout}");
    }
    let n_ss: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("n_ss = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.015..0.06).contains(&n_ss), "n_ss = {n_ss}");

    let text = read(&csv);
    assert!(text.contains("# command = steady"));
    assert!(text.contains("# defaulted = Gamma_s, delta"));
    assert!(text.contains("# Gamma_s = 1.95"));
    assert!(text.contains("# delta = 500.5"));
    assert!(text.contains("# metadata = working point"));
    assert!(text.contains("axis,value,n_ss,n_env,n_scatter,p_ground,residual,fock_dim,converged"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("none,0,"));
    assert!(rows[0].ends_with(",true"));
}

#[test]
fn unknown_key_fails_naming_the_key() {
    let ws = Workspace::new("badkey");
    let config = ws.file(
        "bad.toml",
        &base_params().replace("Gamma_a", "Gama_a"),
    );
    let (code, _, stderr) = run(&["steady", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.starts_with("error: config:"), "stderr: {stderr}");
    assert!(stderr.contains("Gama_a"), "stderr: {stderr}");
}

#[test]
fn single_point_sweep_matches_steady() {
    let ws = Workspace::new("onepoint");
    let steady_csv = ws.path("steady.csv");
    let sweep_csv = ws.path("sweep.csv");
    let steady_cfg = ws.file(
        "steady.toml",
        &format!("{}\n[output]\ncsv_path = {:?}\n", base_params(), steady_csv),
    );
    let sweep_cfg = ws.file(
        "sweep.toml",
        &format!(
            "{}\n[sweep]\naxis = \"Omega\"\nstart = 4.0\nstop = 4.0\npoints = 1\n\n[output]\ncsv_path = {:?}\n",
            base_params(),
            sweep_csv
        ),
    );
    let (code_a, _, _) = run(&["steady", "--config", steady_cfg.to_str().unwrap()]);
    let (code_b, _, _) = run(&["sweep", "--config", sweep_cfg.to_str().unwrap()]);
    assert_eq!((code_a, code_b), (0, 0));

    let steady_row = &data_rows(&read(&steady_csv))[0];
    let sweep_row = &data_rows(&read(&sweep_csv))[0];
    // Identical physics columns; only the axis/value prefix differs.
    let tail = |row: &str| {
        row.split(',')
            .skip(2)
            .map(str::to_string)
            .collect::<Vec<_>>()
    };
    assert_eq!(tail(steady_row), tail(sweep_row));
    assert!(sweep_row.starts_with("Omega,4,"));
}

#[test]
fn sweep_output_is_bit_identical_across_runs() {
    let ws = Workspace::new("determinism");
    let csv_a = ws.path("a.csv");
    let csv_b = ws.path("b.csv");
    let body = format!(
        "{}\n[sweep]\naxis = \"Omega\"\nstart = 2.0\nstop = 4.0\npoints = 3\n",
        base_params()
    );
    let cfg = ws.file("sweep.toml", &body);
    let (code_a, _, _) = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv_a.to_str().unwrap(),
    ]);
    let (code_b, _, _) = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv_b.to_str().unwrap(),
    ]);
    assert_eq!((code_a, code_b), (0, 0));
    assert_eq!(std::fs::read(&csv_a).unwrap(), std::fs::read(&csv_b).unwrap());
}

#[test]
fn fit_from_csv_reproduces_inline_fit() {
    let ws = Workspace::new("fit");
    let sweep_csv = ws.path("sweep.csv");
    let sweep_cfg = ws.file(
        "sweep.toml",
        &format!(
            "{}\n[sweep]\naxis = \"Omega\"\nstart = 2.0\nstop = 4.0\npoints = 3\n\n[output]\ncsv_path = {:?}\n",
            base_params(),
            sweep_csv
        ),
    );
    let (code, _, _) = run(&["sweep", "--config", sweep_cfg.to_str().unwrap()]);
    assert_eq!(code, 0);

    let inline_cfg = ws.file(
        "fit-inline.toml",
        &format!(
            "{}\n[sweep]\naxis = \"Omega\"\nstart = 2.0\nstop = 4.0\npoints = 3\n\n[fit]\nomega_window = [2.0, 4.0]\n\n[output]\ncsv_path = {:?}\n",
            base_params(),
            ws.path("fit-inline.csv")
        ),
    );
    let from_csv_cfg = ws.file(
        "fit-csv.toml",
        &format!(
            "{}\n[fit]\nomega_window = [2.0, 4.0]\ninput_csv = {:?}\n\n[output]\ncsv_path = {:?}\n",
            base_params(),
            sweep_csv,
            ws.path("fit-csv.csv")
        ),
    );
    let (code_a, stdout_a, _) = run(&["fit", "--config", inline_cfg.to_str().unwrap()]);
    let (code_b, stdout_b, _) = run(&["fit", "--config", from_csv_cfg.to_str().unwrap()]);
    assert_eq!((code_a, code_b), (0, 0));
    let line = |s: &str, key: &str| -> String {
        s.lines()
            .find(|l| l.starts_with(key))
            .unwrap_or_else(|| panic!("no {key} in {s}"))
            .to_string()
    };
    assert_eq!(line(&stdout_a, "C = "), line(&stdout_b, "C = "));
    assert_eq!(line(&stdout_a, "G = "), line(&stdout_b, "G = "));
    assert!(line(&stdout_a, "C = ").split(" = ").nth(1).unwrap().parse::<f64>().unwrap() > 0.0);
}

#[test]
fn fit_with_too_few_rows_exits_3() {
    let ws = Workspace::new("fitshort");
    // Hand-written two-row sweep CSV; no solver run needed.
    let sweep_csv = ws.file(
        "tiny.csv",
        "# resonator-cooling simulator output\n\
         # command = sweep\n\
         # axis = Omega\n\
         # spacing = linear\n\
         # link_delta_to_sideband = true\n\
         # nu = 0.5\n# Q = 1000000\n# Gamma_a = 0.05\n# Gamma_s = 1.95\n# Gamma_phi = 0\n\
         # eta = 0.003\n# Omega = 4\n# Lambda = 500\n# N_i = 400\n# delta = 500.5\n# fock_dim = 5\n\
         axis,value,n_ss,n_env,n_scatter,p_ground,residual,fock_dim,converged\n\
         Omega,3,0.03,0.028,0.002,0.97,1e-15,10,true\n\
         Omega,4,0.0302,0.028,0.0022,0.97,1e-15,10,true\n",
    );
    let cfg = ws.file(
        "fit.toml",
        &format!(
            "{}\n[fit]\ninput_csv = {:?}\n\n[output]\ncsv_path = {:?}\n",
            base_params(),
            sweep_csv,
            ws.path("fit.csv")
        ),
    );
    let (code, _, stderr) = run(&["fit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 3, "stderr: {stderr}");
    assert!(stderr.starts_with("error: fit-data:"), "stderr: {stderr}");
}

#[test]
fn evolve_zero_time_writes_single_row() {
    let ws = Workspace::new("evolve0");
    let csv = ws.path("evolve.csv");
    let cfg = ws.file(
        "evolve.toml",
        &format!(
            "{}\n[solver]\nevolve_t_final = 0.0\n\n[output]\ncsv_path = {:?}\n",
            base_params(),
            csv
        ),
    );
    let (code, stdout, _) = run(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("final n = "));
    assert!(stdout.contains("steady-state n_ss = "));
    let text = read(&csv);
    assert!(text.contains("t,n,trace_error"));
    assert_eq!(data_rows(&text).len(), 1);
}

#[test]
fn evolve_without_t_final_exits_1() {
    let ws = Workspace::new("evolvemissing");
    let cfg = ws.file(
        "evolve.toml",
        &format!("{}\n[output]\ncsv_path = \"x.csv\"\n", base_params()),
    );
    let (code, _, stderr) = run(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("evolve_t_final"), "stderr: {stderr}");
}

#[test]
fn sweep_without_section_exits_1() {
    let ws = Workspace::new("nosweep");
    let cfg = ws.file(
        "steady-only.toml",
        &format!("{}\n[output]\ncsv_path = \"x.csv\"\n", base_params()),
    );
    let (code, _, stderr) = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("[sweep]"), "stderr: {stderr}");
}

#[test]
fn missing_csv_path_exits_1() {
    let ws = Workspace::new("noout");
    let cfg = ws.file("bare.toml", base_params());
    let (code, _, stderr) = run(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("csv_path"), "stderr: {stderr}");
}
