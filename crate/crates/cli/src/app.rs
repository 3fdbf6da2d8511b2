//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{self, EquilibriumArgs, Suite};
use crate::error::CliError;
use crate::suites::THEOREM1_TRIALS;

/// Rotopulsators of the curved n-body problem.
#[derive(Debug, Parser)]
#[command(name = "curved-nbody", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the system described by a JSON config and write CSV output.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Directory for the output files; defaults to the config's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Solve for the radius of a regular-polygon relative equilibrium.
    Equilibrium {
        #[arg(long, allow_negative_numbers = true)]
        sigma: i32,
        #[arg(long)]
        n: usize,
        /// One mass for all bodies, or one per body with --diagnostic.
        #[arg(long, num_args = 1.., required = true)]
        mass: Vec<f64>,
        #[arg(long)]
        angular_speed: f64,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Accept unequal masses and report the tangential residual.
        #[arg(long)]
        diagnostic: bool,
    },
    /// Run a certification suite and write a JSON report.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = THEOREM1_TRIALS)]
        trials: usize,
        /// Report path; defaults to verify_<suite>.json.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Runs a parsed command, returning its stdout text.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Simulate { config, out_dir } => commands::simulate(&config, out_dir.as_deref()),
        Command::Equilibrium {
            sigma,
            n,
            mass,
            angular_speed,
            r_min,
            r_max,
            json,
            diagnostic,
        } => commands::equilibrium(&EquilibriumArgs {
            sigma,
            n,
            masses: mass,
            angular_speed,
            r_min,
            r_max,
            json,
            diagnostic,
        }),
        Command::Verify {
            suite,
            seed,
            trials,
            json,
        } => commands::verify(suite, seed, trials, json.as_deref()),
    }
}

/// Exit status of a full invocation, parse errors included.
pub fn exit_code<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Err(e) => e.exit_code(),
        Ok(cli) => run(cli).map_or_else(|e| e.exit_code(), |_| 0),
    }
}

#[cfg(test)]
mod tests {
    use std::fs;
    use std::path::Path;

    use super::*;

    const TRIANGLE: &str = r#"{
        "sigma": 1, "class": "positive_elliptic", "n": 3, "masses": [1, 1, 1],
        "initial": {"r0": 0.6, "rdot0": 0.05, "thetadot0": 1.0},
        "integrator": {"t_end": 1.0}
    }"#;

    fn simulate(dir: &Path, config: &str) -> i32 {
        let path = dir.join("run.json");
        fs::write(&path, config).unwrap();
        exit_code(["curved-nbody", "simulate", "--config", path.to_str().unwrap()])
    }

    #[test]
    fn simulate_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(simulate(dir.path(), TRIANGLE), 0);
        assert_eq!(
            simulate(
                dir.path(),
                &TRIANGLE.replace("\"r0\": 0.6", "\"r0\": 0.9, \"z1_0\": 0.5")
            ),
            2
        );
        let head_on = TRIANGLE.replace("\"n\": 3, \"masses\": [1, 1, 1]", "\"n\": 2, \"masses\": [1, 1]");
        let head_on = head_on
            .replace("\"rdot0\": 0.05, \"thetadot0\": 1.0", "\"rdot0\": 0.0")
            .replace("0.6", "0.5");
        assert_eq!(
            simulate(dir.path(), &head_on.replace("\"t_end\": 1.0", "\"t_end\": 10.0")),
            3
        );
        let underflow = TRIANGLE
            .replace("[1, 1, 1]", "[1, 2, 3]")
            .replace("\"t_end\": 1.0", "\"t_end\": 5.0");
        assert_eq!(simulate(dir.path(), &underflow), 4);
    }

    #[test]
    fn equilibrium_exit_codes() {
        let base = [
            "curved-nbody",
            "equilibrium",
            "--n",
            "3",
            "--mass",
            "1",
            "--angular-speed",
            "1",
        ];
        let with = |extra: &[&str]| exit_code(base.iter().chain(extra));
        assert_eq!(with(&["--sigma", "-1"]), 0);
        assert_eq!(with(&["--sigma", "1"]), 0);
        assert_eq!(with(&["--sigma", "1", "--r-max", "1.5"]), 2);
        assert_eq!(with(&["--sigma", "3"]), 2);
        assert_eq!(with(&[]), 2);
    }

    #[test]
    fn verify_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let json = dir.path().join("report.json");
        let json = json.to_str().unwrap();
        assert_eq!(exit_code(["curved-nbody", "verify", "lemma1", "--json", json]), 0);
        assert_eq!(
            exit_code(["curved-nbody", "verify", "theorem1", "--trials", "0", "--json", json]),
            1
        );
        assert_eq!(exit_code(["curved-nbody", "verify", "bogus"]), 2);
    }
}
