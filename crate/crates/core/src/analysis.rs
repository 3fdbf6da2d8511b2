//! Numerical certificates for the structural results on polygonal
//! rotopulsators: conservation of `ρ²φ′`, equality of the hyperbolic phases
//! and equality of masses for non-equilibrium polygons.

use alloc::vec::Vec;
use core::f64::consts::TAU;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{SystemState, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::CurvatureSign;
use crate::rotopulsator::{
    argmin, b_coefficient, build_negative_hyperbolic, chord_matrix, hyperbolic_phase_residual, regular_phases,
    shape_deviation, tangential_coefficient, RotopulsatorClass, RotopulsatorSpec,
};

/// `ρ²φ′ = q₄q̇₃ − q₃q̇₄` read off the first body.
pub fn rho_sq_phi_dot(state: &SystemState) -> f64 {
    let b = &state.bodies[0];
    b.q[3] * b.v[2] - b.q[2] * b.v[3]
}

/// Largest deviation of `ρ²φ′` from its initial value along a hyperbolic run.
pub fn lemma1_drift(traj: &Trajectory) -> Result<f64> {
    match &traj.ansatz {
        Some(spec) if spec.class.is_hyperbolic() => {}
        _ => return Err(Error::NotHyperbolicClass),
    }
    Ok(max_drift(traj.samples.iter().map(|s| rho_sq_phi_dot(&s.state))))
}

/// `max |xₖ − x₀|` over a series.
pub fn max_drift(mut series: impl Iterator<Item = f64>) -> f64 {
    let Some(first) = series.next() else { return 0.0 };
    series.fold(0.0, |m: f64, x| m.max((x - first).abs()))
}

/// Outcome of a batch of distinct-β phase-residual trials.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Theorem1Report {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Smallest residual observed at the min-β index.
    pub min_residual: f64,
    pub failures: usize,
    pub passed: bool,
}

/// Residuals at or below this count as zero.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// Random hyperbolic configurations with distinct `β`: masses in
/// `[0.1, 10]`, `ρ ∈ [1.01, 5]`, `β ∈ [−2, 2]`. Trial `k` draws from stream
/// `k` of a ChaCha generator seeded with `seed`, so results do not depend on
/// evaluation order.
pub fn theorem1_scan(n: usize, trials: usize, seed: u64) -> Result<Theorem1Report> {
    if n < 2 || trials == 0 {
        return Err(Error::InvalidInput("need n ≥ 2 and at least one trial".into()));
    }
    let mut min_residual = f64::INFINITY;
    let mut failures = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let masses: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
        let beta = loop {
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut sorted = b.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).all(|w| w[0] < w[1]) {
                break b;
            }
        };
        let spec = RotopulsatorSpec {
            rho0: rng.random_range(1.01..5.0),
            phi0: rng.random_range(-1.0..1.0),
            theta0: rng.random_range(0.0..TAU),
            beta,
            ..RotopulsatorSpec::new(RotopulsatorClass::NegativeHyperbolic, masses)
        };
        let state = build_negative_hyperbolic(&spec)?;
        let chords = chord_matrix(&state);
        let i = argmin(&spec.beta);
        let r = hyperbolic_phase_residual(&spec.masses, spec.rho0, &spec.beta, &chords, i)?;
        min_residual = min_residual.min(r);
        if !(r > RESIDUAL_FLOOR) {
            failures += 1;
        }
    }
    Ok(Theorem1Report {
        n,
        trials,
        seed,
        min_residual,
        failures,
        passed: failures == 0,
    })
}

/// `true` iff every distinct-β trial leaves a strictly positive residual.
pub fn theorem1_certificate(n: usize, trials: usize, seed: u64) -> Result<bool> {
    theorem1_scan(n, trials, seed).map(|r| r.passed)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MassKernelReport {
    pub n: usize,
    pub sigma: CurvatureSign,
    pub r_samples: Vec<f64>,
    pub matrix_rows: usize,
    pub kernel_dim: usize,
    /// Orthonormal basis of the numerical kernel.
    pub kernel_basis: Vec<Vec<f64>>,
    /// Smallest singular value outside the kernel; with a one-dimensional
    /// kernel this is the second-smallest singular value.
    pub second_smallest_sv: f64,
    pub largest_sv: f64,
    pub singular_values: Vec<f64>,
}

/// Singular values below this fraction of the largest are treated as zero.
pub const NULLSPACE_RTOL: f64 = 1e-10;

pub fn default_r_samples(sigma: CurvatureSign) -> Vec<f64> {
    match sigma {
        CurvatureSign::Positive => alloc::vec![0.3, 0.7],
        CurvatureSign::Negative => alloc::vec![0.5, 2.0],
    }
}

/// Nullspace of the linear system in the masses formed by the tangential
/// equations at every `r` sample and, optionally, `bᵢ = bᵢ₊₁`.
pub fn mass_kernel(
    n: usize,
    sigma: CurvatureSign,
    r_samples: &[f64],
    include_b_equality: bool,
) -> Result<MassKernelReport> {
    if n < 3 {
        return Err(Error::InvalidInput("mass kernel needs n ≥ 3".into()));
    }
    let mut distinct = r_samples.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 || r_samples.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidInput(
            "need at least two distinct positive r samples".into(),
        ));
    }
    let per_sample = if include_b_equality { 2 * n - 1 } else { n };
    let rows = per_sample * r_samples.len();
    let mut m = DMatrix::<f64>::zeros(rows, n);
    for (s, &r) in r_samples.iter().enumerate() {
        let tan: Vec<f64> = (0..n)
            .map(|k| {
                if k == 0 {
                    Ok(0.0)
                } else {
                    coeff(tangential_coefficient(k, n, r, sigma), k)
                }
            })
            .collect::<Result<_>>()?;
        let bco: Vec<f64> = (0..n)
            .map(|k| {
                if k == 0 {
                    Ok(0.0)
                } else {
                    coeff(b_coefficient(k, n, r, sigma), k)
                }
            })
            .collect::<Result<_>>()?;
        let base = s * per_sample;
        for i in 0..n {
            for j in 0..n {
                let k = (j + n - i) % n;
                m[(base + i, j)] = tan[k];
            }
        }
        if include_b_equality {
            for i in 0..n - 1 {
                for j in 0..n {
                    m[(base + n + i, j)] = bco[(j + n - i) % n] - bco[(j + n - i - 1) % n];
                }
            }
        }
    }

    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let largest = singular_values[0];
    let kernel_dim = singular_values
        .iter()
        .filter(|s| **s < NULLSPACE_RTOL * largest)
        .count();
    let kernel_basis = order[n - kernel_dim..]
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = v_t.row(k).iter().copied().collect();
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            v
        })
        .collect();
    let second_smallest_sv = if kernel_dim < n {
        singular_values[n - kernel_dim - 1]
    } else {
        0.0
    };
    Ok(MassKernelReport {
        n,
        sigma,
        r_samples: r_samples.to_vec(),
        matrix_rows: rows,
        kernel_dim,
        kernel_basis,
        second_smallest_sv,
        largest_sv: largest,
        singular_values,
    })
}

fn coeff(c: Option<f64>, k: usize) -> Result<f64> {
    c.ok_or(Error::SingularPair { i: 0, j: k })
}

/// Distance of `v` from the span of an orthonormal `basis`.
pub fn distance_to_span(v: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut rest = v.to_vec();
    for b in basis {
        let p: f64 = rest.iter().zip(b).map(|(x, y)| x * y).sum();
        rest.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
    }
    rest.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Ansatz scalars recovered from an integrated polygonal run.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Regression {
    pub max_shape_deviation: f64,
    pub r_series: Vec<f64>,
    /// Unwrapped rotation phase.
    pub theta_series: Vec<f64>,
}

impl Regression {
    pub fn r_variation(&self) -> f64 {
        let (lo, hi) = self
            .r_series
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(*r), hi.max(*r))
            });
        hi - lo
    }
}

/// Fits `r` as the RMS planar radius and `θ` as the circular mean of
/// `atan2(q₂, q₁) − αᵢ` at every sample.
pub fn rotopulsator_regression(traj: &Trajectory) -> Regression {
    let n = traj.first().state.n();
    let alpha = traj
        .ansatz
        .as_ref()
        .map(|s| s.phases())
        .unwrap_or_else(|| regular_phases(n));
    let mut r_series = Vec::with_capacity(traj.samples.len());
    let mut theta_series: Vec<f64> = Vec::with_capacity(traj.samples.len());
    let mut max_shape: f64 = 0.0;
    for s in &traj.samples {
        let (r, theta) = planar_fit(&s.state, &alpha);
        r_series.push(r);
        let theta = match theta_series.last() {
            Some(prev) => prev + wrap_angle(theta - prev),
            None => theta,
        };
        theta_series.push(theta);
        max_shape = max_shape.max(shape_deviation(&s.state));
    }
    Regression {
        max_shape_deviation: max_shape,
        r_series,
        theta_series,
    }
}

fn planar_fit(state: &SystemState, alpha: &[f64]) -> (f64, f64) {
    let n = state.n() as f64;
    let (mut r2, mut cs, mut sn) = (0.0, 0.0, 0.0);
    for (b, a) in state.bodies.iter().zip(alpha) {
        r2 += b.q[0] * b.q[0] + b.q[1] * b.q[1];
        let phase = b.q[1].atan2(b.q[0]) - a;
        let (s, c) = phase.sin_cos();
        cs += c;
        sn += s;
    }
    ((r2 / n).sqrt(), sn.atan2(cs))
}

/// Representative of `x` in `(−π, π]`.
fn wrap_angle(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    s.atan2(c)
}

/// Largest componentwise position difference between two states after
/// rotating `b` in the `(x₁, x₂)` plane to best match `a`.
pub fn distance_mod_planar_rotation(a: &SystemState, b: &SystemState) -> f64 {
    let (mut dot, mut cross) = (0.0, 0.0);
    for (p, q) in a.bodies.iter().zip(&b.bodies) {
        dot += p.q[0] * q.q[0] + p.q[1] * q.q[1];
        cross += q.q[0] * p.q[1] - q.q[1] * p.q[0];
    }
    let angle = cross.atan2(dot);
    let (s, c) = angle.sin_cos();
    a.bodies.iter().zip(&b.bodies).fold(0.0, |m: f64, (p, q)| {
        let mut r = q.q;
        r[0] = c * q.q[0] - s * q.q[1];
        r[1] = s * q.q[0] + c * q.q[1];
        m.max(p.q.max_abs_diff(&r))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Body, Diagnostics, IntegratorStats, Sample};
    use crate::geometry::{Bivector, Vec4};
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    const POS: CurvatureSign = CurvatureSign::Positive;
    const NEG: CurvatureSign = CurvatureSign::Negative;

    fn fake_trajectory(states: Vec<SystemState>, ansatz: Option<RotopulsatorSpec>) -> Trajectory {
        let samples = states
            .into_iter()
            .map(|state| Sample {
                diagnostics: Diagnostics {
                    max_constraint_residual: 0.0,
                    max_tangency_residual: 0.0,
                    wedge: Bivector::ZERO,
                    shape_deviation: 0.0,
                    rho_sq_phi_dot: None,
                },
                state,
            })
            .collect();
        Trajectory {
            samples,
            stats: IntegratorStats::default(),
            ansatz,
        }
    }

    #[test]
    fn lemma_drift_of_synthetic_path_vanishes() {
        // ρ(t) = 1.5 + 0.1 sin t, φ′ = c/ρ², sampled on one body
        let c = 0.8;
        let states = (0..200)
            .map(|k| {
                let t = k as f64 * 0.05;
                let rho = 1.5 + 0.1 * t.sin();
                let rhodot = 0.1 * t.cos();
                let phi = 0.3 * t; // value is irrelevant to the invariant
                let phidot = c / (rho * rho);
                let (sh, ch) = (phi.sinh(), phi.cosh());
                let q = Vec4::new(0.0, 0.0, rho * sh, rho * ch);
                let v = Vec4::new(
                    0.0,
                    0.0,
                    rhodot * sh + rho * phidot * ch,
                    rhodot * ch + rho * phidot * sh,
                );
                SystemState {
                    t,
                    bodies: vec![Body { q, v }],
                    masses: vec![1.0],
                    sigma: NEG,
                }
            })
            .collect();
        let spec = RotopulsatorSpec::equal_masses(RotopulsatorClass::NegativeHyperbolic, 2, 1.0);
        let traj = fake_trajectory(states, Some(spec));
        assert!(lemma1_drift(&traj).unwrap() <= 1e-13);
    }

    #[test]
    fn lemma_drift_requires_hyperbolic_ansatz() {
        let st = SystemState {
            t: 0.0,
            bodies: vec![Body {
                q: Vec4::new(0.0, 0.0, 0.0, 1.0),
                v: Vec4::ZERO,
            }],
            masses: vec![1.0],
            sigma: NEG,
        };
        assert_eq!(
            lemma1_drift(&fake_trajectory(vec![st.clone()], None)),
            Err(Error::NotHyperbolicClass)
        );
        let ell = RotopulsatorSpec::equal_masses(RotopulsatorClass::NegativeElliptic, 2, 1.0);
        assert_eq!(
            lemma1_drift(&fake_trajectory(vec![st], Some(ell))),
            Err(Error::NotHyperbolicClass)
        );
    }

    #[test]
    fn theorem1_small_batches() {
        assert!(theorem1_certificate(2, 100, 1).unwrap());
        let rep = theorem1_scan(4, 200, 3).unwrap();
        assert!(rep.passed && rep.min_residual > RESIDUAL_FLOOR);
        assert_eq!(theorem1_scan(4, 200, 3).unwrap(), rep);
        assert!(theorem1_scan(1, 10, 0).is_err());
    }

    #[test]
    fn equal_beta_control_has_zero_residual() {
        let spec = RotopulsatorSpec {
            rho0: 2.0,
            beta: vec![0.4; 4],
            ..RotopulsatorSpec::new(RotopulsatorClass::NegativeHyperbolic, vec![1.0, 2.0, 3.0, 4.0])
        };
        let st = build_negative_hyperbolic(&spec).unwrap();
        let chords = chord_matrix(&st);
        assert_eq!(
            hyperbolic_phase_residual(&spec.masses, 2.0, &spec.beta, &chords, 0).unwrap(),
            0.0
        );
    }

    /// Applies the mass system to `v` through `criterion_residuals` and
    /// linearity, independent of the matrix assembly in `mass_kernel`.
    fn annihilates(n: usize, sigma: CurvatureSign, r_samples: &[f64], b_rows: bool, v: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for &r in r_samples {
            let res = crate::rotopulsator::criterion_residuals(
                &v.iter().map(|x| x + 10.0).collect::<Vec<_>>(),
                r,
                sigma,
                None,
            )
            .unwrap();
            let base = crate::rotopulsator::criterion_residuals(&vec![10.0; n], r, sigma, None).unwrap();
            for i in 0..n {
                worst = worst.max((res.tangential[i] - base.tangential[i]).abs());
            }
            if b_rows {
                for i in 0..n - 1 {
                    let d = (res.b[i] - res.b[i + 1]) - (base.b[i] - base.b[i + 1]);
                    worst = worst.max(d.abs());
                }
            }
        }
        worst
    }

    #[test]
    fn odd_polygons_force_equal_masses() {
        let rep = mass_kernel(5, POS, &default_r_samples(POS), false).unwrap();
        assert_eq!(rep.kernel_dim, 1);
        let ones = vec![1.0 / 5f64.sqrt(); 5];
        for (a, b) in rep.kernel_basis[0].iter().zip(&ones) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert!(rep.second_smallest_sv > 1e-6 * rep.largest_sv);
        assert_eq!(rep.matrix_rows, 10);
    }

    #[test]
    fn even_polygons_leave_alternating_family() {
        let rep = mass_kernel(4, NEG, &default_r_samples(NEG), false).unwrap();
        assert_eq!(rep.kernel_dim, 2);
        assert!(distance_to_span(&[1.0, 1.0, 1.0, 1.0], &rep.kernel_basis) < 1e-10);
        assert!(distance_to_span(&[1.0, -1.0, 1.0, -1.0], &rep.kernel_basis) < 1e-10);
        // the oracle agrees that (M, m, M, m) solves the tangential rows
        assert!(annihilates(4, NEG, &[0.5, 2.0], false, &[1.0, -1.0, 1.0, -1.0]) < 1e-12);
        assert!(annihilates(4, NEG, &[0.5, 2.0], true, &[1.0, -1.0, 1.0, -1.0]) > 1e-3);

        let rep = mass_kernel(4, NEG, &default_r_samples(NEG), true).unwrap();
        assert_eq!(rep.kernel_dim, 1);
        assert!(distance_to_span(&[0.5, 0.5, 0.5, 0.5], &rep.kernel_basis) < 1e-10);
    }

    #[test]
    fn kernel_basis_is_annihilated() {
        for n in 3..=8 {
            for &sigma in &[POS, NEG] {
                for &b in &[false, true] {
                    let samples = default_r_samples(sigma);
                    let rep = mass_kernel(n, sigma, &samples, b).unwrap();
                    assert_eq!(rep.kernel_dim, if n % 2 == 0 && !b { 2 } else { 1 });
                    for v in &rep.kernel_basis {
                        assert!(annihilates(n, sigma, &samples, b, v) < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn mass_kernel_rejects_bad_samples() {
        assert!(mass_kernel(5, POS, &[0.3], false).is_err());
        assert!(mass_kernel(5, POS, &[0.3, 0.3], false).is_err());
        assert!(mass_kernel(2, POS, &[0.3, 0.5], false).is_err());
        assert!(matches!(
            mass_kernel(4, POS, &[0.3, 1.0], false),
            Err(Error::SingularPair { .. })
        ));
    }

    #[test]
    fn angle_wrapping() {
        assert_abs_diff_eq!(
            wrap_angle(3.5 * core::f64::consts::PI),
            -0.5 * core::f64::consts::PI,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(wrap_angle(0.2), 0.2, epsilon = 1e-15);
    }
}
