//! Acceptance suite: one pass/fail line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};

use curved_nbody::analysis::{distance_mod_planar_rotation, rotopulsator_regression};
use curved_nbody::dynamics::{integrate_monitored, IntegratorOptions, Trajectory};
use curved_nbody::equilibria::{solve_equilibrium, EquilibriumProblem};
use curved_nbody::rotopulsator::{build, RotopulsatorClass, RotopulsatorSpec};
use curved_nbody::CurvatureSign;
use curved_nbody_cli::report::Verdict;
use curved_nbody_cli::suites::{self, SuiteOutcome, THEOREM1_TRIALS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;

struct Criterion {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn pulsating(class: RotopulsatorClass, n: usize, thetadot0: f64) -> RotopulsatorSpec {
    RotopulsatorSpec {
        r0: 0.6,
        rdot0: 0.05,
        thetadot0,
        ..RotopulsatorSpec::equal_masses(class, n, 1.0)
    }
}

fn run(spec: &RotopulsatorSpec, t_end: f64) -> Trajectory {
    integrate_monitored(&build(spec).unwrap(), t_end, &IntegratorOptions::default(), Some(spec)).unwrap()
}

fn e(x: f64) -> String {
    format!("{x:.3e}")
}

/// Verdicts of `outcome` whose check name starts with `prefix`.
fn select(outcome: &SuiteOutcome, prefix: &str) -> (bool, String) {
    let picked: Vec<&Verdict> = outcome
        .verdicts
        .iter()
        .filter(|v| v.check.starts_with(prefix))
        .collect();
    assert!(!picked.is_empty(), "no verdicts under {prefix}");
    let failed: Vec<String> = picked
        .iter()
        .filter(|v| !v.passed)
        .map(|v| format!("{} [{}]", v.check, v.detail))
        .collect();
    if failed.is_empty() {
        (true, format!("{} checks passed", picked.len()))
    } else {
        (false, failed.join("; "))
    }
}

fn cli(dir: &Path, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_curved-nbody"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
        .status
        .success()
}

fn main() -> ExitCode {
    let mut out = Vec::new();
    let mut push = |id, name, passed, detail: String| {
        out.push(Criterion {
            id,
            name,
            passed,
            detail,
        })
    };

    let pos = run(&pulsating(RotopulsatorClass::PositiveElliptic, 3, 1.0), 20.0);
    let neg = run(&pulsating(RotopulsatorClass::NegativeElliptic, 3, 1.0), 20.0);

    // 1
    let (c, t) = (pos.max_constraint_residual(), pos.max_tangency_residual());
    push(
        1,
        "manifold fidelity",
        c <= 1e-8 && t <= 1e-8,
        format!("constraint {}, tangency {}", e(c), e(t)),
    );

    // 2
    let (wp, wn) = (pos.max_wedge_drift(), neg.max_wedge_drift());
    push(
        2,
        "wedge conservation",
        wp <= 1e-8 && wn <= 1e-8,
        format!("sigma=+1 {}, sigma=-1 {}", e(wp), e(wn)),
    );

    // 3
    let mut shape_ok = true;
    let mut detail = Vec::new();
    for (label, traj) in [("sigma=+1", &pos), ("sigma=-1", &neg)] {
        let reg = rotopulsator_regression(traj);
        shape_ok &= reg.max_shape_deviation <= 1e-7 && reg.r_variation() >= 1e-3;
        detail.push(format!(
            "{label} shape {} r var {}",
            e(reg.max_shape_deviation),
            e(reg.r_variation())
        ));
    }
    push(3, "shape invariance", shape_ok, detail.join(", "));

    // 4
    let lemma = suites::lemma1().unwrap();
    let (ok, _) = select(&lemma, "lemma1: rho^2");
    let (ok2, _) = select(&lemma, "lemma1: wedge_34");
    let num = |k: &str| lemma.results[k].as_f64().unwrap();
    push(
        4,
        "rho^2 phi' conservation",
        ok && ok2,
        format!(
            "drift {}, wedge_34 gap {}",
            e(num("lemma1_drift")),
            e(num("wedge34_gap"))
        ),
    );

    // 5
    let t1 = suites::theorem1(SEED, THEOREM1_TRIALS).unwrap();
    let (ok, d) = select(&t1, "theorem1");
    push(5, "distinct-beta residuals", ok, d);

    // 6, 7
    let t2 = suites::theorem2(SEED).unwrap();
    let (ok, d) = select(&t2, "theorem2: sigma");
    push(6, "mass kernel", ok, d);
    let cancel = suites::equal_mass_cancellation(SEED, 64, 20).unwrap();
    push(
        7,
        "equal-mass cancellation",
        cancel <= 1e-14,
        format!("max |tangential|/n {}", e(cancel)),
    );

    // 8, 9
    let mono = suites::monotonicity(SEED).unwrap();
    let (ok, d) = select(&mono, "monotonicity");
    let w = &mono.results["window"];
    push(
        8,
        "monotonicity window",
        ok,
        format!(
            "{d}; x*^2 = {}, vs 5/8 {}, vs 8/5 {}",
            w["threshold_sq"], w["distance_to_printed"], w["distance_to_symbolic"]
        ),
    );
    let (ok, d) = select(&mono, "uniqueness");
    push(9, "uniqueness", ok, d);

    // 10
    let a = 0.9;
    let eq = solve_equilibrium(&EquilibriumProblem::equal_masses(
        3,
        1.0,
        CurvatureSign::Negative,
        a,
        (1e-3, 50.0),
    ))
    .unwrap();
    let r = eq.roots[0];
    let spec = RotopulsatorSpec {
        r0: r,
        thetadot0: a,
        ..RotopulsatorSpec::equal_masses(RotopulsatorClass::NegativeElliptic, 3, 1.0)
    };
    let start = build(&spec).unwrap();
    let traj = integrate_monitored(
        &start,
        TAU / a,
        &IntegratorOptions::with_tolerances(1e-12, 1e-14),
        Some(&spec),
    )
    .unwrap();
    let dist = distance_mod_planar_rotation(&start, &traj.last().state);
    let r_dev = rotopulsator_regression(&traj)
        .r_series
        .iter()
        .fold(0.0f64, |m, x| m.max((x - r).abs()));
    push(
        10,
        "equilibrium round trip",
        dist <= 1e-6 && r_dev <= 1e-8,
        format!("return {}, r deviation {}", e(dist), e(r_dev)),
    );

    // 11
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut equal = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let spec = RotopulsatorSpec {
            rho0: rng.random_range(1.01..4.0),
            rhodot0: rng.random_range(-1.0..1.0),
            phi0: rng.random_range(-1.0..1.0),
            phidot0: rng.random_range(-1.0..1.0),
            theta0: rng.random_range(0.0..TAU),
            thetadot0: rng.random_range(-1.0..1.0),
            beta: vec![rng.random_range(-2.0..2.0); n],
            ..RotopulsatorSpec::new(
                RotopulsatorClass::NegativeEllipticHyperbolic,
                (0..n).map(|_| rng.random_range(0.1..10.0)).collect(),
            )
        };
        if build(&spec).unwrap() == build(&spec.elliptic_counterpart().unwrap()).unwrap() {
            equal += 1;
        }
    }
    push(
        11,
        "hyperbolic-elliptic identification",
        equal == 100,
        format!("{equal}/100 builds identical"),
    );

    // 12
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let config = r#"{
        "sigma": -1, "class": "negative_elliptic", "n": 3, "masses": [1, 1, 1],
        "initial": {"r0": 0.6, "rdot0": 0.05, "thetadot0": 1.4},
        "integrator": {"method": "rk4", "h0": 0.01, "t_end": 2.0, "sample_dt": 0.05}
    }"#;
    let mut ran = true;
    for dir in &dirs {
        fs::write(dir.path().join("run.json"), config).unwrap();
        ran &= cli(dir.path(), &["simulate", "--config", "run.json"]);
        ran &= cli(dir.path(), &["verify", "theorem1", "--seed", "7", "--trials", "200"]);
    }
    let files = ["trajectory.csv", "diagnostics.csv", "verify_theorem1.json"];
    let same = files
        .iter()
        .all(|f| fs::read(dirs[0].path().join(f)).ok() == fs::read(dirs[1].path().join(f)).ok());
    push(
        12,
        "determinism",
        ran && same,
        format!("{} files compared across two invocations", files.len()),
    );

    let mut failed = 0;
    for c in &out {
        println!(
            "criterion {:>2}  {:<36} {}  {}",
            c.id,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
        failed += usize::from(!c.passed);
    }

    // stable reference regimes, not gating
    for (class, n, w) in [
        (RotopulsatorClass::PositiveElliptic, 3, 2.0),
        (RotopulsatorClass::PositiveElliptic, 4, 2.5),
        (RotopulsatorClass::NegativeElliptic, 3, 1.4),
    ] {
        let reg = rotopulsator_regression(&run(&pulsating(class, n, w), 10.0));
        println!(
            "  reference {class:?} n={n} theta'={w} t<=10: shape {} r var {}",
            e(reg.max_shape_deviation),
            e(reg.r_variation())
        );
    }

    println!("{} of {} criteria passed", out.len() - failed, out.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
