//! CSV emission for trajectories and their diagnostics.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use curved_nbody::dynamics::Trajectory;

use crate::error::CliError;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_header(n: usize) -> String {
    let mut cols = vec!["t".to_string()];
    for i in 1..=n {
        cols.extend((1..=4).map(|k| format!("q{i}_{k}")));
        cols.extend((1..=4).map(|k| format!("v{i}_{k}")));
    }
    cols.join(",")
}

pub const DIAGNOSTICS_HEADER: &str = "t,max_constraint_residual,max_tangency_residual,\
wedge_12,wedge_13,wedge_14,wedge_23,wedge_24,wedge_34,shape_deviation,rho_sq_phi_dot";

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.first().state.n();
    let mut out = trajectory_header(n);
    out.push('\n');
    for s in &traj.samples {
        out.push_str(&fmt_real(s.state.t));
        for b in &s.state.bodies {
            for x in b.q.0.iter().chain(&b.v.0) {
                out.push(',');
                out.push_str(&fmt_real(*x));
            }
        }
        out.push('\n');
    }
    out
}

/// One row per sample; `rho_sq_phi_dot` is left empty without a hyperbolic
/// ansatz.
pub fn diagnostics_csv(traj: &Trajectory) -> String {
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let d = &s.diagnostics;
        let mut row = vec![s.state.t, d.max_constraint_residual, d.max_tangency_residual];
        row.extend(d.wedge.0);
        row.push(d.shape_deviation);
        let mut line = row.iter().map(|x| fmt_real(*x)).collect::<Vec<_>>().join(",");
        line.push(',');
        if let Some(x) = d.rho_sq_phi_dot {
            line.push_str(&fmt_real(x));
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}
