//! Sweep the drive amplitude at the experimental working point and print
//! the resulting steady-state occupation curve.

use dicke_cooling::{run_sweep, PhysicalParams, SweepAxis, SweepSpec};

fn main() {
    let params = PhysicalParams::default()
        .with_subradiant_width(0.05)
        .on_red_sideband();
    let spec = SweepSpec {
        base: params,
        axis: SweepAxis::Omega,
        values: (1..=10).map(|i| i as f64).collect(),
        link_delta_to_sideband: false,
    };

    let result = run_sweep(&spec).expect("sweep failed");
    println!("{:>6}  {:>10}  {:>10}  {:>10}", "Omega", "n_ss", "n_env", "n_scatter");
    for row in &result.rows {
        println!(
            "{:>6.1}  {:>10.5}  {:>10.5}  {:>10.5}",
            row.axis_value, row.n_ss, row.n_env, row.n_scatter
        );
    }
    let best = result
        .rows
        .iter()
        .filter(|r| r.converged)
        .min_by(|a, b| a.n_ss.total_cmp(&b.n_ss))
        .expect("no converged rows");
    println!("\ncoldest point: n_ss = {:.5} at Omega = {}", best.n_ss, best.axis_value);
}
