//! Equations of motion on the constraint manifold, trajectory integration
//! and per-sample diagnostics.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{dot_sigma, wedge_bivector, Bivector, CurvatureSign, Vec4};
use crate::rotopulsator::{shape_deviation, RotopulsatorSpec};

mod integrate;

pub use integrate::{integrate, integrate_monitored, IntegratorOptions, IntegratorStats, Method};

/// Pairs with `|σ − σ(qᵢ·qⱼ)²|` below this are treated as singular.
pub const DEFAULT_COLLISION_EPS: f64 = 1e-12;

/// Tolerance used when validating that a state lies on the manifold.
pub const MANIFOLD_TOL: f64 = 1e-9;

/// Position and velocity of one body.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Body {
    pub q: Vec4,
    pub v: Vec4,
}

/// Instantaneous state of the n-body system.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    pub t: f64,
    pub bodies: Vec<Body>,
    pub masses: Vec<f64>,
    pub sigma: CurvatureSign,
}

impl SystemState {
    /// Builds a state and checks every invariant: positive masses, positions
    /// on the manifold, tangent velocities and, for `σ = −1`, the upper sheet.
    pub fn new(t: f64, bodies: Vec<Body>, masses: Vec<f64>, sigma: CurvatureSign) -> Result<Self> {
        let state = SystemState {
            t,
            bodies,
            masses,
            sigma,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.bodies.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.bodies.is_empty() {
            return Err(Error::InvalidInput("state has no bodies".into()));
        }
        if self.masses.len() != self.bodies.len() {
            return Err(Error::LengthMismatch {
                expected: self.bodies.len(),
                got: self.masses.len(),
            });
        }
        if let Some(m) = self.masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "masses must be positive and finite, got {m}"
            )));
        }
        let s = self.sigma.value();
        for (i, b) in self.bodies.iter().enumerate() {
            if !b.q.is_finite() || !b.v.is_finite() {
                return Err(Error::OffManifold(format!("body {i} has non-finite coordinates")));
            }
            let c = dot_sigma(&b.q, &b.q, self.sigma) - s;
            if c.abs() > MANIFOLD_TOL {
                return Err(Error::OffManifold(format!("body {i} violates q·q = σ by {c:e}")));
            }
            let tv = dot_sigma(&b.q, &b.v, self.sigma);
            if tv.abs() > MANIFOLD_TOL {
                return Err(Error::OffManifold(format!(
                    "body {i} velocity is not tangent (q·v = {tv:e})"
                )));
            }
            if self.sigma == CurvatureSign::Negative && !(b.q[3] > 0.0) {
                return Err(Error::OffManifold(format!("body {i} is not on the upper sheet")));
            }
        }
        Ok(())
    }

    pub fn positions(&self) -> Vec<Vec4> {
        self.bodies.iter().map(|b| b.q).collect()
    }

    pub fn velocities(&self) -> Vec<Vec4> {
        self.bodies.iter().map(|b| b.v).collect()
    }

    pub fn wedge(&self) -> Bivector {
        wedge_bivector(&self.positions(), &self.velocities(), &self.masses).expect("state lengths are consistent")
    }

    /// Copy of the state with all velocities negated.
    pub fn reversed(&self) -> SystemState {
        let mut out = self.clone();
        for b in out.bodies.iter_mut() {
            b.v = -b.v;
        }
        out
    }
}

/// Accelerations of every body with the default collision threshold.
pub fn accelerations(state: &SystemState) -> Result<Vec<Vec4>> {
    let mut out = alloc::vec![Vec4::ZERO; state.n()];
    accelerations_into(
        &state.bodies,
        &state.masses,
        state.sigma,
        DEFAULT_COLLISION_EPS,
        &mut out,
    )?;
    Ok(out)
}

/// Evaluates
///
/// `q̈ᵢ = Σ_{j≠i} mⱼ (qⱼ − σ(qᵢ·qⱼ) qᵢ) / (σ − σ(qᵢ·qⱼ)²)^{3/2} − σ(q̇ᵢ·q̇ᵢ) qᵢ`
///
/// into `out`.
pub fn accelerations_into(
    bodies: &[Body],
    masses: &[f64],
    sigma: CurvatureSign,
    collision_eps: f64,
    out: &mut [Vec4],
) -> Result<()> {
    let s = sigma.value();
    let n = bodies.len();
    for (i, bi) in bodies.iter().enumerate() {
        let mut acc = bi.q * (-s * dot_sigma(&bi.v, &bi.v, sigma));
        for (j, bj) in bodies.iter().enumerate() {
            if j == i {
                continue;
            }
            let c = dot_sigma(&bi.q, &bj.q, sigma);
            let d = s - s * c * c;
            // negative d only arises off the manifold
            if !(d > collision_eps) {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                return Err(Error::SingularConfiguration { i: a, j: b });
            }
            acc += (bj.q - bi.q * (s * c)) * (masses[j] / (d * d * d).sqrt());
        }
        out[i] = acc;
    }
    debug_assert_eq!(out.len(), n);
    Ok(())
}

/// Scalar monitors attached to each trajectory sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    /// `maxᵢ |qᵢ·qᵢ − σ|`
    pub max_constraint_residual: f64,
    /// `maxᵢ |qᵢ·vᵢ|`
    pub max_tangency_residual: f64,
    pub wedge: Bivector,
    pub shape_deviation: f64,
    pub rho_sq_phi_dot: Option<f64>,
}

/// Diagnostics of a state. Shape deviation and `ρ²φ′` are filled in only
/// when an ansatz is supplied.
pub fn diagnostics_of(state: &SystemState, ansatz: Option<&RotopulsatorSpec>) -> Diagnostics {
    let s = state.sigma.value();
    let mut max_c: f64 = 0.0;
    let mut max_t: f64 = 0.0;
    for b in &state.bodies {
        max_c = max_c.max((dot_sigma(&b.q, &b.q, state.sigma) - s).abs());
        max_t = max_t.max(dot_sigma(&b.q, &b.v, state.sigma).abs());
    }
    let (shape, rho) = match ansatz {
        Some(spec) => (
            shape_deviation(state),
            spec.class
                .is_hyperbolic()
                .then(|| crate::analysis::rho_sq_phi_dot(state)),
        ),
        None => (0.0, None),
    };
    Diagnostics {
        max_constraint_residual: max_c,
        max_tangency_residual: max_t,
        wedge: state.wedge(),
        shape_deviation: shape,
        rho_sq_phi_dot: rho,
    }
}

/// One emitted sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub state: SystemState,
    pub diagnostics: Diagnostics,
}

/// Time-ordered samples of an integrated solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub stats: IntegratorStats,
    /// Ansatz the run was built from, if any.
    pub ansatz: Option<RotopulsatorSpec>,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectories hold at least one sample")
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.state.t)
    }

    /// Largest componentwise wedge drift over the run, relative to
    /// `max(1, |initial wedge|)`.
    pub fn max_wedge_drift(&self) -> f64 {
        let w0 = self.first().diagnostics.wedge;
        let scale = w0.max_abs().max(1.0);
        self.samples.iter().fold(0.0, |m: f64, s| {
            let w = s.diagnostics.wedge;
            (0..6).fold(m, |m, k| m.max((w.0[k] - w0.0[k]).abs() / scale))
        })
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.samples
            .iter()
            .fold(0.0, |m: f64, s| m.max(s.diagnostics.max_constraint_residual))
    }

    pub fn max_tangency_residual(&self) -> f64 {
        self.samples
            .iter()
            .fold(0.0, |m: f64, s| m.max(s.diagnostics.max_tangency_residual))
    }

    pub fn max_shape_deviation(&self) -> f64 {
        self.samples
            .iter()
            .fold(0.0, |m: f64, s| m.max(s.diagnostics.shape_deviation))
    }
}
