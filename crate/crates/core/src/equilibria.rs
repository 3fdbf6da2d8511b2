//! Relative equilibria of shared-height regular polygons.
//!
//! A polygon with constant `r`, constant heights and `θ(t) = At` solves the
//! equations of motion exactly when
//!
//! ```text
//! A² (1, 0) = Σ_{j≠i} mⱼ (1 − cos Δⱼᵢ, sin Δⱼᵢ) f(√2 r √(1 − cos Δⱼᵢ)),
//! f(x) = (x² − σx⁴/4)^{-3/2}.
//! ```
//!
//! For equal masses the second component vanishes identically, leaving the
//! scalar equation `A²(r) = A²` which is solved by grid scan and bisection.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::CurvatureSign;
use crate::rotopulsator::gap_trig;

/// Square of the unique zero of `d/dx (x f(x))` on `(0, 2)` for `σ = +1`;
/// `x f(x)` decreases strictly below it. Confirmed by a finite-difference
/// bisection in [`locate_xf_sign_change`].
pub const XF_THRESHOLD_SQ: f64 = 8.0 / 5.0;

/// Square of the threshold as printed alongside the uniqueness argument.
pub const PRINTED_THRESHOLD_SQ: f64 = 5.0 / 8.0;

/// Radius bound printed with the uniqueness statement, `(2/5)√5`.
pub fn printed_r_bound() -> f64 {
    0.4 * 5f64.sqrt()
}

/// Grid points used by [`solve_equilibrium`].
pub const GRID_POINTS: usize = 2048;

/// Relative width at which root brackets are accepted.
pub const BRACKET_TOL: f64 = 1e-12;

/// `(x² − σx⁴/4)^{-3/2}`, defined for `x > 0` (and `x < 2` when `σ = +1`).
pub fn f_kernel(x: f64, sigma: CurvatureSign) -> Result<f64> {
    let base = kernel_base(x, sigma)?;
    Ok(1.0 / (base * base * base).sqrt())
}

fn kernel_base(x: f64, sigma: CurvatureSign) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::DomainError(format!("kernel argument {x} must be positive")));
    }
    let x2 = x * x;
    let base = x2 - sigma.value() * x2 * x2 / 4.0;
    if !(base > 0.0) {
        return Err(Error::DomainError(format!("x = {x} lies outside (0, 2) on the sphere")));
    }
    Ok(base)
}

/// `d/dx (x f(x))`.
///
/// With `x f(x) = x^{-2} (1 − σx²/4)^{-3/2}`,
/// `d/dx (x f(x)) = x f(x) · (−2/x + (3σx/4) / (1 − σx²/4))`.
pub fn xf_derivative(x: f64, sigma: CurvatureSign) -> Result<f64> {
    let f = f_kernel(x, sigma)?;
    let s = sigma.value();
    let g = 1.0 - s * x * x / 4.0;
    Ok(x * f * (-2.0 / x + 0.75 * s * x / g))
}

/// Location of the sign change of `d/dx (x f(x))` for `σ = +1`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonotonicityWindow {
    /// Bracket `[lo, hi]` containing the sign change.
    pub bracket: (f64, f64),
    /// Squared midpoint of the bracket.
    pub threshold_sq: f64,
    pub sign_changes: usize,
    /// `|threshold_sq − 5/8|`
    pub distance_to_printed: f64,
    /// `|threshold_sq − 8/5|`
    pub distance_to_symbolic: f64,
    /// Which candidate the located threshold matches, within the bracket or
    /// the finite-difference resolution.
    pub matches: ThresholdMatch,
    /// `r` bounds implied by `4r² < x*²` for each candidate.
    pub r_bound_from_printed_sq: f64,
    pub r_bound_printed: f64,
    pub r_bound_from_symbolic_sq: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ThresholdMatch {
    Printed,
    Symbolic,
    Neither,
}

/// Central finite difference of `x ↦ x f(x)`.
pub fn xf_finite_difference(x: f64, sigma: CurvatureSign, h: f64) -> Result<f64> {
    let xf = |y: f64| f_kernel(y, sigma).map(|f| y * f);
    Ok((xf(x + h)? - xf(x - h)?) / (2.0 * h))
}

/// Scans `d/dx (x f(x))` on `(0, 2)` for `σ = +1` using finite differences
/// only, and bisects each sign change down to width `tol`.
pub fn locate_xf_sign_change(tol: f64) -> Result<MonotonicityWindow> {
    let sigma = CurvatureSign::Positive;
    let h = 1e-6;
    let sign = |x: f64| xf_finite_difference(x, sigma, h).map(|d| d > 0.0);
    let samples = 4000;
    let (lo_end, hi_end) = (0.01, 1.99);
    let mut changes = Vec::new();
    let mut prev_x = lo_end;
    let mut prev_s = sign(prev_x)?;
    for k in 1..=samples {
        let x = lo_end + (hi_end - lo_end) * k as f64 / samples as f64;
        let s = sign(x)?;
        if s != prev_s {
            changes.push((prev_x, x));
        }
        prev_x = x;
        prev_s = s;
    }
    let &(mut lo, mut hi) = changes
        .first()
        .ok_or_else(|| Error::DomainError("no sign change of d(xf)/dx on (0, 2)".into()))?;
    let lo_sign = sign(lo)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if sign(mid)? == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let threshold_sq = mid * mid;
    let width_sq = hi * hi - lo * lo;
    let distance_to_printed = (threshold_sq - PRINTED_THRESHOLD_SQ).abs();
    let distance_to_symbolic = (threshold_sq - XF_THRESHOLD_SQ).abs();
    // finite differences resolve the crossing only to about 1e-10 in x²
    let match_tol = width_sq.max(tol).max(1e-8);
    let matches = if distance_to_symbolic <= match_tol {
        ThresholdMatch::Symbolic
    } else if distance_to_printed <= match_tol {
        ThresholdMatch::Printed
    } else {
        ThresholdMatch::Neither
    };
    Ok(MonotonicityWindow {
        bracket: (lo, hi),
        threshold_sq,
        sign_changes: changes.len(),
        distance_to_printed,
        distance_to_symbolic,
        matches,
        r_bound_from_printed_sq: (PRINTED_THRESHOLD_SQ / 4.0).sqrt(),
        r_bound_printed: printed_r_bound(),
        r_bound_from_symbolic_sq: (XF_THRESHOLD_SQ / 4.0).sqrt(),
    })
}

/// Upper end of the default search range for `σ = +1`: the largest chord
/// argument `2r` stays below the monotonicity threshold.
pub fn safe_r_max() -> f64 {
    (0.99 * XF_THRESHOLD_SQ.sqrt() / 2.0).min(0.999)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquilibriumProblem {
    pub n: usize,
    pub masses: Vec<f64>,
    pub sigma: CurvatureSign,
    /// Target angular speed `A > 0`.
    pub angular_speed: f64,
    pub r_range: (f64, f64),
    /// Accept unequal masses and report the tangential residual instead of
    /// roots.
    pub diagnostic: bool,
}

impl EquilibriumProblem {
    pub fn equal_masses(n: usize, m: f64, sigma: CurvatureSign, angular_speed: f64, r_range: (f64, f64)) -> Self {
        EquilibriumProblem {
            n,
            masses: alloc::vec![m; n],
            sigma,
            angular_speed,
            r_range,
            diagnostic: false,
        }
    }

    fn equal(&self) -> bool {
        self.masses.iter().all(|m| *m == self.masses[0])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInput(format!("need at least two bodies, got {}", self.n)));
        }
        if self.masses.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: self.masses.len(),
            });
        }
        if self.masses.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidInput("masses must be positive and finite".into()));
        }
        if !self.diagnostic && !self.equal() {
            return Err(Error::InvalidInput(
                "unequal masses admit no polygonal equilibrium; use diagnostic mode".into(),
            ));
        }
        if !(self.angular_speed > 0.0 && self.angular_speed.is_finite()) {
            return Err(Error::InvalidInput("angular speed must be positive".into()));
        }
        let (lo, hi) = self.r_range;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid radius range [{lo}, {hi}]")));
        }
        if self.sigma == CurvatureSign::Positive && !(hi < 1.0) {
            return Err(Error::DomainError(format!(
                "r_max = {hi} must stay below 1 on the sphere"
            )));
        }
        Ok(())
    }
}

/// `(A²(r), tangential(r))` at body 1 of the regular polygon.
pub fn angular_speed_squared(r: f64, prob: &EquilibriumProblem) -> Result<(f64, f64)> {
    let n = prob.n;
    if prob.masses.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: prob.masses.len(),
        });
    }
    if !prob.diagnostic && !prob.equal() {
        return Err(Error::InvalidInput("unequal masses require diagnostic mode".into()));
    }
    let mut asq = 0.0;
    let mut tangential = 0.0;
    for k in 1..n {
        let (c, s) = gap_trig(k, n);
        let u = 1.0 - c;
        let f = f_kernel(core::f64::consts::SQRT_2 * r * u.sqrt(), prob.sigma)?;
        let m = prob.masses[k];
        asq += m * u * f;
        tangential += m * s * f;
    }
    Ok((asq, tangential))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquilibriumReport {
    /// Radii with `A²(r) = A²`, ascending.
    pub roots: Vec<f64>,
    pub root_count: usize,
    /// `A²(r)` strictly decreases across the whole grid.
    pub monotone_certificate: bool,
    pub bracket_tol: f64,
    /// Largest `|tangential(r)|` seen on the grid.
    pub max_tangential: f64,
}

/// Finds every radius in `prob.r_range` with `A²(r) = A²`.
pub fn solve_equilibrium(prob: &EquilibriumProblem) -> Result<EquilibriumReport> {
    prob.validate()?;
    let target = prob.angular_speed * prob.angular_speed;
    let (lo, hi) = prob.r_range;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|k| {
            if k == GRID_POINTS - 1 {
                hi
            } else if k == 0 {
                lo
            } else {
                (llo + (lhi - llo) * k as f64 / (GRID_POINTS - 1) as f64).exp()
            }
        })
        .collect();
    let mut values = Vec::with_capacity(GRID_POINTS);
    let mut max_tangential: f64 = 0.0;
    for &r in &grid {
        let (asq, t) = angular_speed_squared(r, prob)?;
        values.push(asq);
        max_tangential = max_tangential.max(t.abs());
    }
    let monotone_certificate = values.windows(2).all(|w| w[1] < w[0]);

    let mut roots = Vec::new();
    if prob.equal() {
        let g = |r: f64| angular_speed_squared(r, prob).map(|(a, _)| a - target);
        for k in 0..GRID_POINTS {
            let gk = values[k] - target;
            if gk == 0.0 {
                roots.push(grid[k]);
                continue;
            }
            if k + 1 < GRID_POINTS {
                let gn = values[k + 1] - target;
                if gn != 0.0 && gk.signum() != gn.signum() {
                    roots.push(bisect(&g, grid[k], grid[k + 1], gk)?);
                }
            }
        }
    }
    if monotone_certificate {
        debug_assert!(roots.len() <= 1);
    }
    Ok(EquilibriumReport {
        root_count: roots.len(),
        roots,
        monotone_certificate,
        bracket_tol: BRACKET_TOL,
        max_tangential,
    })
}

fn bisect(g: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, g_lo: f64) -> Result<f64> {
    let lo_pos = g_lo > 0.0;
    while hi - lo > BRACKET_TOL * lo.abs().max(hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm > 0.0) == lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const POS: CurvatureSign = CurvatureSign::Positive;
    const NEG: CurvatureSign = CurvatureSign::Negative;

    #[test]
    fn kernel_examples() {
        assert_abs_diff_eq!(f_kernel(1.0, NEG).unwrap(), 0.7155417527999327, epsilon = 1e-15);
        assert_abs_diff_eq!(f_kernel(1.0, POS).unwrap(), 1.539600717839002, epsilon = 1e-15);
        assert!(matches!(f_kernel(2.0, POS), Err(Error::DomainError(_))));
        assert!(f_kernel(0.0, NEG).is_err());
        assert!(f_kernel(-1.0, NEG).is_err());
        assert!(xf_derivative(2.5, POS).is_err());
    }

    #[test]
    fn xf_derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 0..1000 {
            let (sigma, x) = if k % 2 == 0 {
                (NEG, rng.random_range(0.05..10.0))
            } else {
                (POS, rng.random_range(0.05..1.95))
            };
            let exact = xf_derivative(x, sigma).unwrap();
            let fd = xf_finite_difference(x, sigma, 1e-6).unwrap();
            assert!(
                (exact - fd).abs() <= 1e-6 * exact.abs().max(1e-300) + 1e-9,
                "x={x} {exact} {fd}"
            );
        }
    }

    #[test]
    fn xf_derivative_signs() {
        assert!(xf_derivative(1.0, NEG).unwrap() < 0.0);
        assert!(xf_derivative(0.1, POS).unwrap() < 0.0);
        for k in 1..=10_000 {
            let x = 10.0 * k as f64 / 10_000.0;
            assert!(xf_derivative(x, NEG).unwrap() < 0.0);
        }
    }

    #[test]
    fn monotonicity_window_is_the_symbolic_threshold() {
        let w = locate_xf_sign_change(1e-9).unwrap();
        assert_eq!(w.sign_changes, 1);
        assert!(w.bracket.1 - w.bracket.0 <= 1e-9);
        assert_abs_diff_eq!(w.threshold_sq, XF_THRESHOLD_SQ, epsilon = 1e-6);
        assert_eq!(w.matches, ThresholdMatch::Symbolic);
        assert_abs_diff_eq!(w.r_bound_from_printed_sq, 0.39528470752104744, epsilon = 1e-15);
        assert_abs_diff_eq!(w.r_bound_printed, 0.8944271909999159, epsilon = 1e-15);
        assert_abs_diff_eq!(w.r_bound_from_symbolic_sq, 0.6324555320336759, epsilon = 1e-15);
        assert!(xf_derivative(XF_THRESHOLD_SQ.sqrt() - 1e-6, POS).unwrap() < 0.0);
        assert!(xf_derivative(XF_THRESHOLD_SQ.sqrt() + 1e-6, POS).unwrap() > 0.0);
    }

    #[test]
    fn two_body_hyperbolic_fixture() {
        let prob = EquilibriumProblem::equal_masses(2, 1.0, NEG, 1.0, (1e-3, 50.0));
        let (asq, t) = angular_speed_squared(1.0, &prob).unwrap();
        assert_abs_diff_eq!(asq, 0.08838834764831845, epsilon = 1e-15);
        assert_eq!(t, 0.0);
        // closed form m r^{-3} (1 + r²)^{-3/2} / 4
        for &r in &[0.1, 0.5, 2.0, 7.0] {
            let (asq, _) = angular_speed_squared(r, &prob).unwrap();
            let expect = 0.25 / (r * r * r) / (1.0 + r * r).powf(1.5);
            assert_abs_diff_eq!(asq, expect, epsilon = 1e-13 * expect);
        }
        let solved = solve_equilibrium(&EquilibriumProblem {
            angular_speed: 0.08838835f64.sqrt(),
            ..prob
        })
        .unwrap();
        assert_eq!(solved.root_count, 1);
        assert_abs_diff_eq!(solved.roots[0], 1.0, epsilon = 1e-6);
        assert!(solved.monotone_certificate);
    }

    #[test]
    fn doubling_masses_doubles_asq() {
        let p1 = EquilibriumProblem::equal_masses(5, 1.0, POS, 1.0, (0.1, 0.5));
        let p2 = EquilibriumProblem::equal_masses(5, 2.0, POS, 1.0, (0.1, 0.5));
        let a1 = angular_speed_squared(0.37, &p1).unwrap().0;
        let a2 = angular_speed_squared(0.37, &p2).unwrap().0;
        assert_eq!(a2, 2.0 * a1);
    }

    #[test]
    fn equal_mass_tangential_vanishes() {
        for n in 2..=20 {
            for &sigma in &[POS, NEG] {
                let p = EquilibriumProblem::equal_masses(n, 1.0, sigma, 1.0, (0.1, 0.5));
                let (_, t) = angular_speed_squared(0.3, &p).unwrap();
                assert!(t.abs() <= 1e-14 * n as f64);
            }
        }
    }

    #[test]
    fn unreachable_speed_gives_no_roots() {
        let p = EquilibriumProblem::equal_masses(3, 1.0, NEG, 1e6, (0.5, 2.0));
        let rep = solve_equilibrium(&p).unwrap();
        assert!(rep.roots.is_empty());
        assert_eq!(rep.root_count, 0);
    }

    #[test]
    fn problem_validation() {
        let bad = EquilibriumProblem::equal_masses(3, 1.0, POS, 1.0, (0.1, 1.5));
        assert!(matches!(solve_equilibrium(&bad), Err(Error::DomainError(_))));
        let bad = EquilibriumProblem::equal_masses(3, 1.0, NEG, 1.0, (2.0, 1.0));
        assert!(solve_equilibrium(&bad).is_err());
        let mut uneq = EquilibriumProblem::equal_masses(3, 1.0, NEG, 1.0, (0.5, 2.0));
        uneq.masses = vec![1.0, 2.0, 3.0];
        assert!(solve_equilibrium(&uneq).is_err());
        uneq.diagnostic = true;
        let rep = solve_equilibrium(&uneq).unwrap();
        assert!(rep.roots.is_empty());
        assert!(rep.max_tangential > 1e-3);
    }

    #[test]
    fn hyperbolic_uniqueness() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.random_range(2..=8);
            let a: f64 = rng.random_range(0.01..10.0);
            let p = EquilibriumProblem::equal_masses(n, rng.random_range(0.1..5.0), NEG, a, (1e-3, 50.0));
            let rep = solve_equilibrium(&p).unwrap();
            assert!(rep.root_count <= 1);
            assert!(rep.monotone_certificate);
        }
    }

    #[test]
    fn spherical_safe_range_is_monotone() {
        let hi = safe_r_max();
        assert!(hi < 0.999 && hi > 0.6);
        for n in 2..=8 {
            for &a in &[1.0, 3.0, 10.0, 40.0] {
                let p = EquilibriumProblem::equal_masses(n, 1.0, POS, a, (1e-2, hi));
                let rep = solve_equilibrium(&p).unwrap();
                assert!(rep.monotone_certificate);
                assert!(rep.root_count <= 1);
            }
        }
    }
}
