//! JSON run configuration for `simulate`.

use std::fs;
use std::path::{Path, PathBuf};

use curved_nbody::dynamics::{IntegratorOptions, Method, SystemState, DEFAULT_COLLISION_EPS};
use curved_nbody::rotopulsator::{build, Branch, RotopulsatorClass, RotopulsatorSpec};
use curved_nbody::CurvatureSign;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub sigma: CurvatureSign,
    pub class: RotopulsatorClass,
    pub n: usize,
    pub masses: Vec<f64>,
    #[serde(default)]
    pub initial: InitialConditions,
    pub integrator: IntegratorConfig,
    #[serde(default = "default_collision_eps")]
    pub collision_eps: f64,
    #[serde(default)]
    pub output: OutputPaths,
}

/// Initial scalars of the polygonal ansatz. Elliptic classes read the
/// `r`/`z₁` block, hyperbolic classes the `ρ`/`φ`/`β` block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConditions {
    pub alpha: Option<Vec<f64>>,
    pub r0: f64,
    pub rdot0: f64,
    pub theta0: f64,
    pub thetadot0: f64,
    pub z1_0: f64,
    pub z1dot0: f64,
    pub z2_branch: Branch,
    pub beta: Option<Vec<f64>>,
    pub rho0: f64,
    pub rhodot0: f64,
    pub phi0: f64,
    pub phidot0: f64,
}

impl Default for InitialConditions {
    fn default() -> Self {
        InitialConditions {
            alpha: None,
            r0: 0.0,
            rdot0: 0.0,
            theta0: 0.0,
            thetadot0: 0.0,
            z1_0: 0.0,
            z1dot0: 0.0,
            z2_branch: Branch::Upper,
            beta: None,
            rho0: 1.0,
            rhodot0: 0.0,
            phi0: 0.0,
            phidot0: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default)]
    pub h0: Option<f64>,
    pub t_end: f64,
    #[serde(default)]
    pub sample_dt: Option<f64>,
    #[serde(default = "default_min_step")]
    pub min_step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub trajectory: PathBuf,
    pub diagnostics: PathBuf,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            trajectory: "trajectory.csv".into(),
            diagnostics: "diagnostics.csv".into(),
        }
    }
}

fn default_collision_eps() -> f64 {
    DEFAULT_COLLISION_EPS
}

fn default_method() -> Method {
    Method::DormandPrince45
}

fn default_rtol() -> f64 {
    IntegratorOptions::default().rtol
}

fn default_atol() -> f64 {
    IntegratorOptions::default().atol
}

fn default_min_step() -> f64 {
    IntegratorOptions::default().min_step
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Cross-field checks not expressible in the schema.
    fn check(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.class.sigma() != self.sigma {
            return bad(format!(
                "class {:?} lives on σ = {}, but sigma = {}",
                self.class,
                self.class.sigma().value(),
                self.sigma.value()
            ));
        }
        if self.masses.len() != self.n {
            return bad(format!("n = {} but {} masses given", self.n, self.masses.len()));
        }
        if self.class.is_hyperbolic() && self.initial.beta.as_ref().is_some_and(|b| b.len() != self.n) {
            return bad(format!("beta must have n = {} entries", self.n));
        }
        if !(self.integrator.t_end > 0.0 && self.integrator.t_end.is_finite()) {
            return bad("integrator.t_end must be positive".into());
        }
        if !(self.collision_eps >= 0.0) {
            return bad("collision_eps must be non-negative".into());
        }
        self.spec().validate().map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn spec(&self) -> RotopulsatorSpec {
        let ic = &self.initial;
        RotopulsatorSpec {
            class: self.class,
            masses: self.masses.clone(),
            alpha: ic.alpha.clone(),
            r0: ic.r0,
            rdot0: ic.rdot0,
            theta0: ic.theta0,
            thetadot0: ic.thetadot0,
            z1_0: ic.z1_0,
            z1dot0: ic.z1dot0,
            z2_branch: ic.z2_branch,
            beta: ic.beta.clone().unwrap_or_else(|| vec![0.0; self.n]),
            rho0: ic.rho0,
            rhodot0: ic.rhodot0,
            phi0: ic.phi0,
            phidot0: ic.phidot0,
        }
    }

    /// Builds the initial state; manifold violations are config errors.
    pub fn initial_state(&self) -> Result<SystemState, CliError> {
        build(&self.spec()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn options(&self) -> IntegratorOptions {
        let i = &self.integrator;
        IntegratorOptions {
            method: i.method,
            rtol: i.rtol,
            atol: i.atol,
            h0: i.h0,
            sample_dt: i.sample_dt,
            min_step: i.min_step,
            collision_eps: self.collision_eps,
            ..IntegratorOptions::default()
        }
    }
}
