//! Subcommand implementations. Each returns the text for stdout or a
//! [`CliError`] carrying the exit status.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use curved_nbody::dynamics::integrate_monitored;
use curved_nbody::equilibria::{safe_r_max, solve_equilibrium, EquilibriumProblem};
use curved_nbody::CurvatureSign;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{from_integration, CliError};
use crate::output::{diagnostics_csv, trajectory_csv, write_file};
use crate::report::{Report, Verdict};
use crate::suites::{self, SuiteOutcome};

pub fn simulate(config: &Path, out_dir: Option<&Path>) -> Result<String, CliError> {
    let cfg = RunConfig::load(config)?;
    let state = cfg.initial_state()?;
    let spec = cfg.spec();
    let traj =
        integrate_monitored(&state, cfg.integrator.t_end, &cfg.options(), Some(&spec)).map_err(from_integration)?;

    let base = match out_dir {
        Some(dir) => dir.to_path_buf(),
        None => config.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let traj_path = base.join(&cfg.output.trajectory);
    let diag_path = base.join(&cfg.output.diagnostics);
    write_file(&traj_path, &trajectory_csv(&traj))?;
    write_file(&diag_path, &diagnostics_csv(&traj))?;

    Ok(format!(
        "simulated n={} to t={} in {} steps ({} rejected): {} samples, max constraint {:.3e}, \
         max tangency {:.3e}, wedge drift {:.3e}, max shape deviation {:.3e} -> {}, {}",
        state.n(),
        traj.last().state.t,
        traj.stats.steps_accepted,
        traj.stats.steps_rejected,
        traj.samples.len(),
        traj.max_constraint_residual(),
        traj.max_tangency_residual(),
        traj.max_wedge_drift(),
        traj.max_shape_deviation(),
        traj_path.display(),
        diag_path.display(),
    ))
}

pub struct EquilibriumArgs {
    pub sigma: i32,
    pub n: usize,
    pub masses: Vec<f64>,
    pub angular_speed: f64,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub json: Option<PathBuf>,
    pub diagnostic: bool,
}

pub fn equilibrium(args: &EquilibriumArgs) -> Result<String, CliError> {
    let domain = |e: curved_nbody::Error| CliError::Domain(e.to_string());
    let sigma = CurvatureSign::from_int(args.sigma).map_err(domain)?;
    let masses = match args.masses.as_slice() {
        [m] => vec![*m; args.n],
        ms => ms.to_vec(),
    };
    let r_hi_default = match sigma {
        CurvatureSign::Positive => safe_r_max(),
        CurvatureSign::Negative => 50.0,
    };
    let prob = EquilibriumProblem {
        n: args.n,
        masses,
        sigma,
        angular_speed: args.angular_speed,
        r_range: (args.r_min.unwrap_or(1e-3), args.r_max.unwrap_or(r_hi_default)),
        diagnostic: args.diagnostic,
    };
    let rep = solve_equilibrium(&prob).map_err(domain)?;

    let mut report = Report::new("equilibrium", json!({ "problem": prob }), None);
    report.results = json!({ "equilibrium": rep });
    report.verdicts.push(Verdict::new(
        "at most one root",
        rep.root_count <= 1,
        format!("root_count {}", rep.root_count),
    ));
    if prob.diagnostic {
        report.verdicts.push(Verdict::new(
            "tangential residual reported",
            true,
            format!("max |tangential| {:.3e}", rep.max_tangential),
        ));
    }
    let text = report.to_json();
    if let Some(path) = &args.json {
        write_file(path, &text)?;
    }
    Ok(text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemma1,
    Theorem1,
    Theorem2,
    Monotonicity,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Monotonicity => "monotonicity",
            Suite::All => "all",
        }
    }
}

/// Runs a suite, writes its report and returns the table; any failed check
/// yields [`CliError::Verification`] after the report is written.
pub fn verify(suite: Suite, seed: u64, trials: usize, json_path: Option<&Path>) -> Result<String, CliError> {
    let parts = match suite {
        Suite::All => vec![Suite::Lemma1, Suite::Theorem1, Suite::Theorem2, Suite::Monotonicity],
        s => vec![s],
    };
    let mut report = Report::new("verify", json!({ "suite": suite.name(), "trials": trials }), Some(seed));
    let mut results = serde_json::Map::new();
    for part in parts {
        let outcome: SuiteOutcome = match part {
            Suite::Lemma1 => suites::lemma1(),
            Suite::Theorem1 => suites::theorem1(seed, trials),
            Suite::Theorem2 => suites::theorem2(seed),
            Suite::Monotonicity => suites::monotonicity(seed),
            Suite::All => unreachable!("expanded above"),
        }
        .unwrap_or_else(|e| SuiteOutcome {
            results: json!({ "error": e.to_string() }),
            verdicts: vec![Verdict::new(
                format!("{}: suite ran", part.name()),
                false,
                e.to_string(),
            )],
        });
        results.insert(part.name().into(), outcome.results);
        report.verdicts.extend(outcome.verdicts);
    }
    report.results = results.into();

    let default_path = PathBuf::from(format!("verify_{}.json", suite.name()));
    write_file(json_path.unwrap_or(&default_path), &report.to_json())?;
    let table = report.table();
    match report.failures() {
        0 => Ok(table),
        failed => {
            print!("{table}");
            Err(CliError::Verification { failed })
        }
    }
}
