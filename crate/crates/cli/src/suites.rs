//! Certification suites behind `verify`.

use curved_nbody::analysis::{
    default_r_samples, distance_to_span, lemma1_drift, mass_kernel, rho_sq_phi_dot, theorem1_scan, RESIDUAL_FLOOR,
};
use curved_nbody::dynamics::{integrate_monitored, IntegratorOptions, Trajectory};
use curved_nbody::equilibria::{
    locate_xf_sign_change, safe_r_max, solve_equilibrium, xf_derivative, EquilibriumProblem, ThresholdMatch,
    XF_THRESHOLD_SQ,
};
use curved_nbody::rotopulsator::{build, criterion_residuals, RotopulsatorClass, RotopulsatorSpec};
use curved_nbody::{CurvatureSign, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::Verdict;

pub const THEOREM1_TRIALS: usize = 1000;

/// Results and verdicts of one suite.
pub struct SuiteOutcome {
    pub results: Value,
    pub verdicts: Vec<Verdict>,
}

fn fmt(x: f64) -> String {
    format!("{x:.3e}")
}

/// Equal-β elliptic-hyperbolic pair with nonconstant `ρ`.
pub fn lemma1_spec() -> RotopulsatorSpec {
    RotopulsatorSpec {
        rho0: 1.36f64.sqrt(),
        rhodot0: 0.05,
        phi0: 0.0,
        phidot0: 0.3,
        thetadot0: 0.5,
        beta: vec![0.2; 2],
        ..RotopulsatorSpec::equal_masses(RotopulsatorClass::NegativeEllipticHyperbolic, 2, 1.0)
    }
}

pub fn lemma1_run() -> Result<Trajectory, Error> {
    let spec = lemma1_spec();
    integrate_monitored(&build(&spec)?, 10.0, &IntegratorOptions::default(), Some(&spec))
}

/// Largest `|w₃₄ + (Σm) ρ²φ′|` over the samples.
pub fn wedge_lemma_gap(traj: &Trajectory) -> f64 {
    traj.samples.iter().fold(0.0, |m: f64, s| {
        let total: f64 = s.state.masses.iter().sum();
        m.max((s.diagnostics.wedge.get(2, 3) + total * rho_sq_phi_dot(&s.state)).abs())
    })
}

pub fn lemma1() -> Result<SuiteOutcome, Error> {
    let traj = lemma1_run()?;
    let drift = lemma1_drift(&traj)?;
    let gap = wedge_lemma_gap(&traj);
    let rho: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| {
            let q = s.state.bodies[0].q;
            (q[3] * q[3] - q[2] * q[2]).sqrt()
        })
        .collect();
    let rho_range =
        rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - rho.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(SuiteOutcome {
        results: json!({
            "run": {"n": 2, "rho0_sq": 1.36, "rhodot0": 0.05, "phidot0": 0.3, "thetadot0": 0.5, "beta": 0.2, "t_end": 10.0},
            "lemma1_drift": drift,
            "wedge34_gap": gap,
            "rho_range": rho_range,
            "wedge_drift": traj.max_wedge_drift(),
        }),
        verdicts: vec![
            Verdict::new("lemma1: rho^2 phi' drift <= 1e-8", drift <= 1e-8, fmt(drift)),
            Verdict::new(
                "lemma1: wedge_34 = -(sum m) rho^2 phi' within 1e-10",
                gap <= 1e-10,
                fmt(gap),
            ),
            Verdict::new("lemma1: rho nonconstant", rho_range > 1e-3, fmt(rho_range)),
        ],
    })
}

pub fn theorem1(seed: u64, trials: usize) -> Result<SuiteOutcome, Error> {
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for n in 2..=8 {
        let rep = theorem1_scan(n, trials, seed)?;
        verdicts.push(Verdict::new(
            format!("theorem1: n={n}, {trials} distinct-beta trials"),
            rep.passed && rep.min_residual > RESIDUAL_FLOOR,
            format!("min residual {}, failures {}", fmt(rep.min_residual), rep.failures),
        ));
        rows.push(rep);
    }
    Ok(SuiteOutcome {
        results: json!({ "scans": rows, "residual_floor": RESIDUAL_FLOOR }),
        verdicts,
    })
}

fn sign_name(sigma: CurvatureSign) -> &'static str {
    match sigma {
        CurvatureSign::Positive => "+1",
        CurvatureSign::Negative => "-1",
    }
}

/// Tangential residuals of equal masses at random radii, both signs.
pub fn equal_mass_cancellation(seed: u64, n_max: usize, radii: usize) -> Result<f64, Error> {
    let mut worst: f64 = 0.0;
    for n in 2..=n_max {
        for sigma in [CurvatureSign::Positive, CurvatureSign::Negative] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(n as u64);
            for _ in 0..radii {
                let r = rng.random_range(0.05..0.95);
                let res = criterion_residuals(&vec![1.0; n], r, sigma, None)?;
                for t in res.tangential {
                    worst = worst.max(t.abs() / n as f64);
                }
            }
        }
    }
    Ok(worst)
}

pub fn theorem2(seed: u64) -> Result<SuiteOutcome, Error> {
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for sigma in [CurvatureSign::Positive, CurvatureSign::Negative] {
        let samples = default_r_samples(sigma);
        for n in 3..=8 {
            for include_b in [false, true] {
                let rep = mass_kernel(n, sigma, &samples, include_b)?;
                let expected = if include_b || n % 2 == 1 { 1 } else { 2 };
                let ones = vec![1.0 / (n as f64).sqrt(); n];
                let spans_ones = distance_to_span(&ones, &rep.kernel_basis) < 1e-9;
                let gap = rep.second_smallest_sv / rep.largest_sv;
                let rows_kind = if include_b { "tangential+b" } else { "tangential" };
                verdicts.push(Verdict::new(
                    format!("theorem2: sigma={} n={n} {rows_kind}", sign_name(sigma)),
                    rep.kernel_dim == expected && spans_ones && gap > 1e-6,
                    format!(
                        "kernel_dim {} (expected {expected}), sv gap {}",
                        rep.kernel_dim,
                        fmt(gap)
                    ),
                ));
                rows.push(rep);
            }
        }
    }
    let cancel = equal_mass_cancellation(seed, 64, 20)?;
    verdicts.push(Verdict::new(
        "theorem2: equal masses cancel tangentially (n<=64)",
        cancel <= 1e-14,
        format!("max |tangential|/n {}", fmt(cancel)),
    ));
    Ok(SuiteOutcome {
        results: json!({ "kernels": rows, "equal_mass_max_tangential_over_n": cancel }),
        verdicts,
    })
}

/// Largest value of `d/dx(x f(x))` for `σ = −1` on `k/1000`, `k = 1..=10⁴`.
pub fn hyperbolic_xf_max() -> Result<f64, Error> {
    (1..=10_000).try_fold(f64::NEG_INFINITY, |m, k| {
        xf_derivative(k as f64 * 1e-3, CurvatureSign::Negative).map(|d| m.max(d))
    })
}

pub fn monotonicity(seed: u64) -> Result<SuiteOutcome, Error> {
    let neg_max = hyperbolic_xf_max()?;
    let window = locate_xf_sign_change(1e-9)?;
    let width = window.bracket.1 - window.bracket.0;
    let mut verdicts = vec![
        Verdict::new(
            "monotonicity: sigma=-1 d(xf)/dx < 0 on (0,10]",
            neg_max < 0.0,
            format!("max {}", fmt(neg_max)),
        ),
        Verdict::new(
            "monotonicity: sigma=+1 single sign change in (0,2)",
            window.sign_changes == 1,
            format!(
                "{} sign change(s), x*^2 = {:.12}",
                window.sign_changes, window.threshold_sq
            ),
        ),
        Verdict::new("monotonicity: bracket width <= 1e-6", width <= 1e-6, fmt(width)),
        Verdict::new(
            "monotonicity: located threshold is the verified constant",
            window.matches == ThresholdMatch::Symbolic && window.distance_to_symbolic < 1e-9,
            format!(
                "|x*^2 - 8/5| = {}, |x*^2 - 5/8| = {}",
                fmt(window.distance_to_symbolic),
                fmt(window.distance_to_printed)
            ),
        ),
    ];

    // uniqueness of the equal-mass equilibrium radius
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_neg = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=8);
        let a = rng.random_range(0.05..5.0);
        let m = rng.random_range(0.1..5.0);
        let rep = solve_equilibrium(&EquilibriumProblem::equal_masses(
            n,
            m,
            CurvatureSign::Negative,
            a,
            (1e-3, 50.0),
        ))?;
        worst_neg = worst_neg.max(rep.root_count);
    }
    let mut worst_pos = 0;
    let mut pos_monotone = true;
    for _ in 0..50 {
        let n = rng.random_range(2..=8);
        let a = rng.random_range(0.05..20.0);
        let m = rng.random_range(0.1..5.0);
        let rep = solve_equilibrium(&EquilibriumProblem::equal_masses(
            n,
            m,
            CurvatureSign::Positive,
            a,
            (1e-3, safe_r_max()),
        ))?;
        worst_pos = worst_pos.max(rep.root_count);
        pos_monotone &= rep.monotone_certificate;
    }
    verdicts.push(Verdict::new(
        "uniqueness: sigma=-1, 50 problems on [1e-3, 50]",
        worst_neg <= 1,
        format!("max root_count {worst_neg}"),
    ));
    verdicts.push(Verdict::new(
        "uniqueness: sigma=+1, 50 problems on the safe range",
        worst_pos <= 1 && pos_monotone,
        format!("max root_count {worst_pos}, r_max {:.6}", safe_r_max()),
    ));

    let fixture = solve_equilibrium(&EquilibriumProblem::equal_masses(
        2,
        1.0,
        CurvatureSign::Negative,
        0.08838834764831845f64.sqrt(),
        (1e-3, 50.0),
    ))?;
    let fixture_ok = fixture.root_count == 1 && (fixture.roots[0] - 1.0).abs() < 1e-6;
    verdicts.push(Verdict::new(
        "uniqueness: two-body fixture inverts to r = 1",
        fixture_ok,
        format!("roots {:?}", fixture.roots),
    ));

    Ok(SuiteOutcome {
        results: json!({
            "sigma_neg_max_derivative": neg_max,
            "window": window,
            "verified_threshold_sq": XF_THRESHOLD_SQ,
            "candidates": {
                "printed_5_over_8": {"threshold_sq": 5.0 / 8.0, "r_bound": window.r_bound_from_printed_sq},
                "printed_r_bound": window.r_bound_printed,
                "symbolic_8_over_5": {"threshold_sq": 8.0 / 5.0, "r_bound": window.r_bound_from_symbolic_sq},
            },
            "safe_r_max": safe_r_max(),
            "two_body_fixture": fixture,
        }),
        verdicts,
    })
}
