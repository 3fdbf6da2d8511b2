//! Runge–Kutta integration of the equations of motion with per-step
//! projection back onto the manifold.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{accelerations_into, diagnostics_of, Body, Sample, SystemState, Trajectory, DEFAULT_COLLISION_EPS};
use crate::error::{Error, Result};
use crate::geometry::{project_position, project_velocity, Vec4};
use crate::rotopulsator::RotopulsatorSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    /// Adaptive Dormand–Prince 5(4).
    #[cfg_attr(feature = "serde", serde(rename = "rk45"))]
    DormandPrince45,
    /// Classical fixed-step fourth order.
    #[cfg_attr(feature = "serde", serde(rename = "rk4"))]
    ClassicalRk4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    /// Initial step for the adaptive method, the step itself for the fixed
    /// one. When absent the adaptive method picks a step and the fixed
    /// method steps once per sample interval.
    pub h0: Option<f64>,
    /// Sample spacing; defaults to a thousandth of the integration span.
    pub sample_dt: Option<f64>,
    pub min_step: f64,
    pub max_steps: u64,
    pub collision_eps: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            method: Method::DormandPrince45,
            rtol: 1e-10,
            atol: 1e-12,
            h0: None,
            sample_dt: None,
            min_step: 1e-14,
            max_steps: 50_000_000,
            collision_eps: DEFAULT_COLLISION_EPS,
        }
    }
}

impl IntegratorOptions {
    pub fn fixed_step(h: f64) -> Self {
        IntegratorOptions {
            method: Method::ClassicalRk4,
            h0: Some(h),
            ..Default::default()
        }
    }

    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        IntegratorOptions {
            rtol,
            atol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !(positive(self.rtol) && positive(self.atol) && positive(self.min_step)) {
            return Err(Error::InvalidInput("integrator tolerances must be positive".into()));
        }
        if self.h0.is_some_and(|h| !positive(h)) || self.sample_dt.is_some_and(|h| !positive(h)) {
            return Err(Error::InvalidInput("step sizes must be positive".into()));
        }
        if !(self.collision_eps >= 0.0) {
            return Err(Error::InvalidInput("collision threshold must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegratorStats {
    pub steps_accepted: u64,
    pub steps_rejected: u64,
    /// Smallest accepted step, ignoring steps shortened to land on a sample.
    pub min_step: f64,
}

/// Integrates `state` to `t_end` and samples it uniformly.
pub fn integrate(state: &SystemState, t_end: f64, opts: &IntegratorOptions) -> Result<Trajectory> {
    integrate_monitored(state, t_end, opts, None)
}

/// As [`integrate`], additionally tagging the trajectory with the ansatz it
/// was built from so that shape and `ρ²φ′` monitors are filled in.
pub fn integrate_monitored(
    state: &SystemState,
    t_end: f64,
    opts: &IntegratorOptions,
    ansatz: Option<&RotopulsatorSpec>,
) -> Result<Trajectory> {
    opts.validate()?;
    state.validate()?;
    if !(t_end > state.t) || !t_end.is_finite() {
        return Err(Error::InvalidInput("t_end must exceed the initial time".into()));
    }
    let span = t_end - state.t;
    let sample_dt = opts.sample_dt.unwrap_or(span / 1000.0);
    let times = sample_times(state.t, t_end, sample_dt);

    let mut sys = System::new(state, opts.collision_eps);
    let mut y = sys.flatten(&state.bodies);
    let mut t = state.t;
    let mut stats = IntegratorStats {
        min_step: f64::INFINITY,
        ..Default::default()
    };

    let mut samples = Vec::with_capacity(times.len() + 1);
    samples.push(Sample {
        state: state.clone(),
        diagnostics: diagnostics_of(state, ansatz),
    });

    let mut h = match (opts.method, opts.h0) {
        (_, Some(h)) => h,
        (Method::ClassicalRk4, None) => sample_dt,
        (Method::DormandPrince45, None) => sys.initial_step(&y, opts)?.min(sample_dt),
    };

    for &target in &times {
        while t < target {
            if stats.steps_accepted + stats.steps_rejected >= opts.max_steps {
                return Err(Error::StepUnderflow { t, step: h });
            }
            let remaining = target - t;
            let clamped = h >= remaining;
            let step = if clamped { remaining } else { h };
            match opts.method {
                Method::ClassicalRk4 => {
                    sys.rk4_step(&mut y, step)?;
                    stats.steps_accepted += 1;
                }
                Method::DormandPrince45 => {
                    let err = sys.dp45_trial(&y, step, opts)?;
                    let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                    if err > 1.0 {
                        stats.steps_rejected += 1;
                        h = step * factor.min(1.0);
                        if h < opts.min_step {
                            return Err(Error::StepUnderflow { t, step: h });
                        }
                        continue;
                    }
                    y.copy_from_slice(&sys.y_new);
                    stats.steps_accepted += 1;
                    let proposed = step * factor;
                    h = if clamped { h.max(proposed) } else { proposed };
                }
            }
            if !clamped {
                stats.min_step = stats.min_step.min(step);
            }
            t = if clamped { target } else { t + step };
            sys.project(&mut y)?;
        }
        let st = SystemState {
            t,
            bodies: sys.unflatten(&y),
            masses: state.masses.clone(),
            sigma: state.sigma,
        };
        let diagnostics = diagnostics_of(&st, ansatz);
        samples.push(Sample { state: st, diagnostics });
    }
    if !stats.min_step.is_finite() {
        stats.min_step = sample_dt.min(span);
    }
    Ok(Trajectory {
        samples,
        stats,
        ansatz: ansatz.cloned(),
    })
}

/// Sample instants after `t0`: `t0 + k·dt` strictly before `t_end`, then
/// `t_end` itself.
fn sample_times(t0: f64, t_end: f64, dt: f64) -> Vec<f64> {
    let guard = 1e-12 * t_end.abs().max(1.0);
    let mut out = Vec::new();
    let mut k = 1u64;
    loop {
        let tk = t0 + k as f64 * dt;
        if tk >= t_end - guard {
            break;
        }
        out.push(tk);
        k += 1;
    }
    out.push(t_end);
    out
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Flattened first-order system `y = (q₁, v₁, q₂, v₂, …)` with scratch space.
struct System<'a> {
    masses: &'a [f64],
    sigma: crate::CurvatureSign,
    collision_eps: f64,
    bodies: Vec<Body>,
    acc: Vec<Vec4>,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    y_new: Vec<f64>,
}

impl<'a> System<'a> {
    fn new(state: &'a SystemState, collision_eps: f64) -> Self {
        let n = state.n();
        let dim = 8 * n;
        System {
            masses: &state.masses,
            sigma: state.sigma,
            collision_eps,
            bodies: state.bodies.clone(),
            acc: vec![Vec4::ZERO; n],
            k: core::array::from_fn(|_| vec![0.0; dim]),
            stage: vec![0.0; dim],
            y_new: vec![0.0; dim],
        }
    }

    fn flatten(&self, bodies: &[Body]) -> Vec<f64> {
        bodies.iter().flat_map(|b| b.q.0.into_iter().chain(b.v.0)).collect()
    }

    fn unflatten(&self, y: &[f64]) -> Vec<Body> {
        y.chunks_exact(8)
            .map(|c| Body {
                q: Vec4([c[0], c[1], c[2], c[3]]),
                v: Vec4([c[4], c[5], c[6], c[7]]),
            })
            .collect()
    }

    /// `dy = f(y)` into the stage buffer `k[slot]`.
    fn eval(&mut self, slot: usize, y: &[f64]) -> Result<()> {
        for (b, c) in self.bodies.iter_mut().zip(y.chunks_exact(8)) {
            b.q = Vec4([c[0], c[1], c[2], c[3]]);
            b.v = Vec4([c[4], c[5], c[6], c[7]]);
        }
        accelerations_into(&self.bodies, self.masses, self.sigma, self.collision_eps, &mut self.acc)?;
        let out = &mut self.k[slot];
        for ((o, c), a) in out.chunks_exact_mut(8).zip(y.chunks_exact(8)).zip(&self.acc) {
            o[..4].copy_from_slice(&c[4..]);
            o[4..].copy_from_slice(&a.0);
        }
        Ok(())
    }

    fn project(&self, y: &mut [f64]) -> Result<()> {
        for c in y.chunks_exact_mut(8) {
            let q = project_position(&Vec4([c[0], c[1], c[2], c[3]]), self.sigma)?;
            let v = project_velocity(&q, &Vec4([c[4], c[5], c[6], c[7]]), self.sigma);
            c[..4].copy_from_slice(&q.0);
            c[4..].copy_from_slice(&v.0);
        }
        Ok(())
    }

    fn initial_step(&mut self, y: &[f64], opts: &IntegratorOptions) -> Result<f64> {
        self.eval(0, y)?;
        let (mut d0, mut d1) = (0.0, 0.0);
        for (yi, fi) in y.iter().zip(&self.k[0]) {
            let sc = opts.atol + opts.rtol * yi.abs();
            d0 += (yi / sc) * (yi / sc);
            d1 += (fi / sc) * (fi / sc);
        }
        let h = if d0 < 1e-10 || d1 < 1e-10 {
            1e-6
        } else {
            0.01 * (d0 / d1).sqrt()
        };
        Ok(h.max(opts.min_step))
    }

    #[allow(clippy::needless_range_loop)]
    fn rk4_step(&mut self, y: &mut [f64], h: f64) -> Result<()> {
        let dim = y.len();
        self.eval(0, y)?;
        for (s, (yi, k)) in self.stage.iter_mut().zip(y.iter().zip(&self.k[0])) {
            *s = yi + 0.5 * h * k;
        }
        let stage = core::mem::take(&mut self.stage);
        self.eval(1, &stage)?;
        let mut stage = stage;
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * self.k[1][i];
        }
        self.eval(2, &stage)?;
        for i in 0..dim {
            stage[i] = y[i] + h * self.k[2][i];
        }
        self.eval(3, &stage)?;
        self.stage = stage;
        for i in 0..dim {
            y[i] += h / 6.0 * (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i]);
        }
        Ok(())
    }

    /// Attempts one step of size `h`, leaving the fifth-order solution in
    /// `y_new` and returning the scaled RMS error estimate.
    #[allow(clippy::needless_range_loop)]
    fn dp45_trial(&mut self, y: &[f64], h: f64, opts: &IntegratorOptions) -> Result<f64> {
        let dim = y.len();
        self.eval(0, y)?;
        let mut stage = core::mem::take(&mut self.stage);
        for s in 1..7 {
            debug_assert!(C[s] > 0.0);
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, a) in A[s][..s].iter().enumerate() {
                    acc += a * self.k[j][i];
                }
                stage[i] = y[i] + h * acc;
            }
            self.eval(s, &stage)?;
        }
        self.stage = stage;
        // stage 7 was evaluated at the fifth-order solution
        let mut err = 0.0;
        for i in 0..dim {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B5[s] * self.k[s][i];
                lo += B4[s] * self.k[s][i];
            }
            let y5 = y[i] + h * hi;
            self.y_new[i] = y5;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5.abs());
            let e = h * (hi - lo) / sc;
            err += e * e;
        }
        Ok((err / dim as f64).sqrt())
    }
}
