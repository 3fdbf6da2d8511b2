//! Polygonal rotopulsator ansätze: builders, chord tables, shape metrics,
//! the criterion residuals for shared-height polygons and the hyperbolic
//! phase residual.
//!
//! Every body of a polygonal elliptic configuration sits at
//!
//! ```text
//! qᵢ = (r cos(θ + αᵢ), r sin(θ + αᵢ), z₁, z₂)
//! ```
//!
//! with `r, z₁, z₂` shared. In the hyperbolic ansatz the last pair is
//! `ρ (sinh(φ + βᵢ), cosh(φ + βᵢ))` with shared `ρ`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::dynamics::{Body, SystemState};
use crate::error::{Error, Result};
use crate::geometry::{dot_sigma, CurvatureSign, Vec4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RotopulsatorClass {
    PositiveElliptic,
    NegativeElliptic,
    NegativeHyperbolic,
    NegativeEllipticHyperbolic,
}

impl RotopulsatorClass {
    pub fn sigma(self) -> CurvatureSign {
        match self {
            RotopulsatorClass::PositiveElliptic => CurvatureSign::Positive,
            _ => CurvatureSign::Negative,
        }
    }

    /// Whether the last two coordinates follow the hyperbolic ansatz.
    pub fn is_hyperbolic(self) -> bool {
        matches!(
            self,
            RotopulsatorClass::NegativeHyperbolic | RotopulsatorClass::NegativeEllipticHyperbolic
        )
    }
}

/// Branch of `z₂` solved from the constraint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Branch {
    #[default]
    Upper,
    Lower,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }
}

/// Initial data for one of the polygonal ansätze.
///
/// Elliptic classes read `r0, rdot0, z1_0, z1dot0`; hyperbolic classes read
/// `rho0, rhodot0, phi0, phidot0, beta` and derive the planar radius from
/// `r² = ρ² − 1`. All classes read `theta0, thetadot0` and `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotopulsatorSpec {
    pub class: RotopulsatorClass,
    pub masses: Vec<f64>,
    /// Phase offsets; `None` selects the regular polygon `2π(i−1)/n`.
    pub alpha: Option<Vec<f64>>,
    pub r0: f64,
    pub rdot0: f64,
    pub theta0: f64,
    pub thetadot0: f64,
    pub z1_0: f64,
    pub z1dot0: f64,
    pub z2_branch: Branch,
    pub beta: Vec<f64>,
    pub rho0: f64,
    pub rhodot0: f64,
    pub phi0: f64,
    pub phidot0: f64,
}

impl RotopulsatorSpec {
    /// Regular polygon at rest with every scalar zero.
    pub fn new(class: RotopulsatorClass, masses: Vec<f64>) -> Self {
        let n = masses.len();
        RotopulsatorSpec {
            class,
            masses,
            alpha: None,
            r0: 0.0,
            rdot0: 0.0,
            theta0: 0.0,
            thetadot0: 0.0,
            z1_0: 0.0,
            z1dot0: 0.0,
            z2_branch: Branch::Upper,
            beta: alloc::vec![0.0; n],
            rho0: 1.0,
            rhodot0: 0.0,
            phi0: 0.0,
            phidot0: 0.0,
        }
    }

    /// Equal masses `m` on an `n`-gon.
    pub fn equal_masses(class: RotopulsatorClass, n: usize, m: f64) -> Self {
        Self::new(class, alloc::vec![m; n])
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn phases(&self) -> Vec<f64> {
        match &self.alpha {
            Some(a) => a.clone(),
            None => regular_phases(self.n()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least two bodies, got {n}")));
        }
        if let Some(m) = self.masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "masses must be positive and finite, got {m}"
            )));
        }
        if let Some(alpha) = &self.alpha {
            check_phases(alpha, n)?;
        }
        let scalars = [
            self.r0,
            self.rdot0,
            self.theta0,
            self.thetadot0,
            self.z1_0,
            self.z1dot0,
            self.rho0,
            self.rhodot0,
            self.phi0,
            self.phidot0,
        ];
        if scalars.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("initial scalars must be finite".into()));
        }
        if self.class.is_hyperbolic() {
            if self.beta.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: self.beta.len(),
                });
            }
            if self.beta.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidInput("beta must be finite".into()));
            }
        }
        Ok(())
    }

    /// The shared-height elliptic data describing an equal-β hyperbolic
    /// spec, or `None` when the β differ.
    pub fn elliptic_counterpart(&self) -> Option<RotopulsatorSpec> {
        let beta = *self.beta.first()?;
        if !self.class.is_hyperbolic() || self.beta.iter().any(|b| *b != beta) {
            return None;
        }
        let (w, wdot) = planar_from_rho(self.rho0, self.rhodot0).ok()?;
        let (z1, z1dot) = hyperbolic_height(self.rho0, self.rhodot0, beta + self.phi0, self.phidot0);
        Some(RotopulsatorSpec {
            class: RotopulsatorClass::NegativeElliptic,
            r0: w,
            rdot0: wdot,
            z1_0: z1,
            z1dot0: z1dot,
            z2_branch: Branch::Upper,
            ..self.clone()
        })
    }
}

/// `αᵢ = 2π(i−1)/n`.
pub fn regular_phases(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

fn check_phases(alpha: &[f64], n: usize) -> Result<()> {
    if alpha.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: alpha.len(),
        });
    }
    if alpha.iter().any(|a| !(0.0..TAU).contains(a)) {
        return Err(Error::InvalidInput("phase offsets must lie in [0, 2π)".into()));
    }
    if alpha.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("phase offsets must be strictly increasing".into()));
    }
    Ok(())
}

/// Body with shared scalars `(r, ṙ, z₁, ż₁)` at planar angle `angle`; `z₂`
/// and `ż₂` are solved from `r² + z₁² + σz₂² = σ` and its derivative.
#[allow(clippy::too_many_arguments)]
fn shared_height_body(
    sigma: CurvatureSign,
    r: f64,
    rdot: f64,
    angle: f64,
    thetadot: f64,
    z1: f64,
    z1dot: f64,
    branch: Branch,
) -> Result<Body> {
    let radial = r * rdot + z1 * z1dot;
    let (z2, z2dot) = match sigma {
        CurvatureSign::Positive => {
            let rest = 1.0 - r * r - z1 * z1;
            if rest < 0.0 {
                return Err(Error::OffManifold(format!(
                    "r² + z₁² = {} exceeds 1 on the sphere",
                    r * r + z1 * z1
                )));
            }
            let z2 = branch.sign() * rest.sqrt();
            let z2dot = if radial == 0.0 {
                0.0
            } else if z2 == 0.0 {
                return Err(Error::OffManifold(
                    "z₂ = 0 leaves no tangent direction for the given rates".into(),
                ));
            } else {
                -radial / z2
            };
            (z2, z2dot)
        }
        CurvatureSign::Negative => {
            let z2 = (1.0 + r * r + z1 * z1).sqrt();
            (z2, radial / z2)
        }
    };
    let (s, c) = angle.sin_cos();
    Ok(Body {
        q: Vec4::new(r * c, r * s, z1, z2),
        v: Vec4::new(rdot * c - r * thetadot * s, rdot * s + r * thetadot * c, z1dot, z2dot),
    })
}

fn planar_from_rho(rho: f64, rhodot: f64) -> Result<(f64, f64)> {
    if !(rho > 1.0) {
        return Err(Error::DegenerateSize(format!(
            "ρ = {rho} leaves no planar radius (need ρ > 1)"
        )));
    }
    let w = (rho * rho - 1.0).sqrt();
    Ok((w, rho * rhodot / w))
}

/// `(ρ sinh u, d/dt ρ sinh u)` with `u̇ = φ̇`.
fn hyperbolic_height(rho: f64, rhodot: f64, u: f64, phidot: f64) -> (f64, f64) {
    let (sh, ch) = (u.sinh(), u.cosh());
    (rho * sh, rhodot * sh + rho * phidot * ch)
}

/// Builds a shared-height polygonal elliptic configuration.
pub fn build_polygonal_elliptic(spec: &RotopulsatorSpec, sigma: CurvatureSign) -> Result<SystemState> {
    spec.validate()?;
    let ok = matches!(
        (spec.class, sigma),
        (RotopulsatorClass::PositiveElliptic, CurvatureSign::Positive)
            | (RotopulsatorClass::NegativeElliptic, CurvatureSign::Negative)
    );
    if !ok {
        return Err(Error::InvalidInput(format!(
            "class {:?} cannot be built as an elliptic polygon with σ = {}",
            spec.class,
            sigma.value()
        )));
    }
    if sigma == CurvatureSign::Negative && spec.z2_branch != Branch::Upper {
        return Err(Error::InvalidInput(
            "only the upper sheet is supported for σ = −1".into(),
        ));
    }
    if !(spec.r0 > 0.0) {
        return Err(Error::DegenerateSize(format!("r = {} must be positive", spec.r0)));
    }
    if sigma == CurvatureSign::Positive && spec.n() == 2 && spec.r0 >= 1.0 - 1e-6 {
        log::warn!("two-body polygon with r = {} is close to antipodal", spec.r0);
    }
    let bodies = spec
        .phases()
        .iter()
        .map(|a| {
            shared_height_body(
                sigma,
                spec.r0,
                spec.rdot0,
                spec.theta0 + a,
                spec.thetadot0,
                spec.z1_0,
                spec.z1dot0,
                spec.z2_branch,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    SystemState::new(0.0, bodies, spec.masses.clone(), sigma)
}

/// Builds a hyperbolic configuration with shared `ρ` and per-body `βᵢ`.
///
/// With equal `βᵢ` the result coincides bit for bit with
/// [`build_polygonal_elliptic`] applied to [`RotopulsatorSpec::elliptic_counterpart`].
pub fn build_negative_hyperbolic(spec: &RotopulsatorSpec) -> Result<SystemState> {
    spec.validate()?;
    if !spec.class.is_hyperbolic() {
        return Err(Error::InvalidInput(format!(
            "class {:?} has no hyperbolic ansatz",
            spec.class
        )));
    }
    let (w, wdot) = planar_from_rho(spec.rho0, spec.rhodot0)?;
    let bodies = spec
        .phases()
        .iter()
        .zip(&spec.beta)
        .map(|(a, b)| {
            let (z1, z1dot) = hyperbolic_height(spec.rho0, spec.rhodot0, b + spec.phi0, spec.phidot0);
            shared_height_body(
                CurvatureSign::Negative,
                w,
                wdot,
                spec.theta0 + a,
                spec.thetadot0,
                z1,
                z1dot,
                Branch::Upper,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    SystemState::new(0.0, bodies, spec.masses.clone(), CurvatureSign::Negative)
}

/// Builds whichever ansatz `spec.class` names.
pub fn build(spec: &RotopulsatorSpec) -> Result<SystemState> {
    if spec.class.is_hyperbolic() {
        build_negative_hyperbolic(spec)
    } else {
        build_polygonal_elliptic(spec, spec.class.sigma())
    }
}

/// Symmetric `n×n` table of `qᵢ·qⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChordMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ChordMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: r.len(),
            });
        }
        Ok(ChordMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }
}

pub fn chord_matrix(state: &SystemState) -> ChordMatrix {
    let n = state.n();
    let mut data = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let c = dot_sigma(&state.bodies[i].q, &state.bodies[j].q, state.sigma);
            data[i * n + j] = c;
            data[j * n + i] = c;
        }
    }
    ChordMatrix { n, data }
}

/// Largest spread of `chord(i, i+g mod n)` across `i`, over gaps
/// `g = 1..=⌊n/2⌋`. Bodies are taken in phase order; an exact regular
/// polygon scores zero.
pub fn shape_deviation(state: &SystemState) -> f64 {
    let chords = chord_matrix(state);
    let n = chords.n();
    let mut worst: f64 = 0.0;
    for g in 1..=n / 2 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let c = chords.get(i, (i + g) % n);
            lo = lo.min(c);
            hi = hi.max(c);
        }
        worst = worst.max(hi - lo);
    }
    worst
}

/// Residuals of the shared-height polygon criterion.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriterionResiduals {
    pub b: Vec<f64>,
    pub tangential: Vec<f64>,
    /// `max(b) − min(b)`
    pub b_spread: f64,
}

const SINGULAR_TOL: f64 = 1e-12;

/// `(cos Δ, sin Δ)` for the gap `k` of a regular `n`-gon, with exact mirror
/// symmetry between `k` and `n − k`.
pub(crate) fn gap_trig(k: usize, n: usize) -> (f64, f64) {
    let k = k % n;
    if 2 * k > n {
        let (c, s) = gap_trig(n - k, n);
        (c, -s)
    } else if 2 * k == n {
        (-1.0, 0.0)
    } else {
        let (s, c) = (TAU * k as f64 / n as f64).sin_cos();
        (c, s)
    }
}

/// Per-pair factors `((1−cosΔ)^{-1/2}, sinΔ (1−cosΔ)^{-3/2}) · (2 − σr²(1−cosΔ))^{-3/2}`.
fn criterion_terms(cos_d: f64, sin_d: f64, r: f64, sigma: CurvatureSign) -> Option<(f64, f64)> {
    let u = 1.0 - cos_d;
    let w = 2.0 - sigma.value() * r * r * u;
    if !(u > SINGULAR_TOL && w > SINGULAR_TOL) {
        return None;
    }
    let w32 = (w * w * w).sqrt();
    let u12 = u.sqrt();
    Some((1.0 / (u12 * w32), sin_d / (u * u12 * w32)))
}

/// Evaluates `bᵢ` and the tangential sums for masses at phases `alpha`
/// (`None` for the regular polygon, where masses are indexed cyclically).
pub fn criterion_residuals(
    masses: &[f64],
    r: f64,
    sigma: CurvatureSign,
    alpha: Option<&[f64]>,
) -> Result<CriterionResiduals> {
    let n = masses.len();
    if n < 2 {
        return Err(Error::InvalidInput("need at least two masses".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("r = {r} must be positive")));
    }
    if let Some(a) = alpha {
        check_phases(a, n)?;
    }
    let mut b = alloc::vec![0.0; n];
    let mut tangential = alloc::vec![0.0; n];
    for i in 0..n {
        for k in 1..n {
            let j = (i + k) % n;
            let (c, s) = match alpha {
                None => gap_trig(k, n),
                Some(a) => {
                    let (s, c) = (a[j] - a[i]).sin_cos();
                    (c, s)
                }
            };
            let (bt, tt) = criterion_terms(c, s, r, sigma).ok_or(Error::SingularPair {
                i: i.min(j),
                j: i.max(j),
            })?;
            b[i] += masses[j] * bt;
            tangential[i] += masses[j] * tt;
        }
    }
    let (lo, hi) = b.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(*x), hi.max(*x))
    });
    Ok(CriterionResiduals {
        b,
        tangential,
        b_spread: hi - lo,
    })
}

/// Coefficient of `m_{i+k}` in the tangential sum of a regular `n`-gon.
pub(crate) fn tangential_coefficient(k: usize, n: usize, r: f64, sigma: CurvatureSign) -> Option<f64> {
    let (c, s) = gap_trig(k, n);
    criterion_terms(c, s, r, sigma).map(|t| t.1)
}

/// Coefficient of `m_{i+k}` in `bᵢ` for a regular `n`-gon.
pub(crate) fn b_coefficient(k: usize, n: usize, r: f64, sigma: CurvatureSign) -> Option<f64> {
    let (c, s) = gap_trig(k, n);
    criterion_terms(c, s, r, sigma).map(|t| t.0)
}

/// `Σ_{j≠i} mⱼ ρ sinh(βⱼ − βᵢ) / ((qᵢ·qⱼ)² − 1)^{3/2}`.
///
/// At the index of the smallest `β` every term is non-negative, and the sum
/// vanishes only when every `β` coincides.
pub fn hyperbolic_phase_residual(
    masses: &[f64],
    rho: f64,
    beta: &[f64],
    chords: &ChordMatrix,
    i: usize,
) -> Result<f64> {
    let n = masses.len();
    if beta.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: beta.len(),
        });
    }
    if chords.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: chords.n(),
        });
    }
    if i >= n {
        return Err(Error::InvalidInput(format!("index {i} out of range for {n} bodies")));
    }
    let mut sum = 0.0;
    for j in (0..n).filter(|&j| j != i) {
        let c = chords.get(i, j);
        let d = c * c - 1.0;
        if !(d > SINGULAR_TOL) {
            return Err(Error::SingularPair {
                i: i.min(j),
                j: i.max(j),
            });
        }
        sum += masses[j] * rho * (beta[j] - beta[i]).sinh() / (d * d * d).sqrt();
    }
    Ok(sum)
}

/// Index of the smallest entry (first on ties).
pub fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
        )
        .0
}
