//! Acceptance suite: seven criteria, one verdict line each.
//!
//! Runs as a plain binary (`harness = false`) so the verdicts print even when
//! everything passes:
//!
//! ```text
//! cargo test -p nlgreen --test acceptance
//! ```

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nlgreen::calibrate::{default_bracket, kernel_for, Calibration, CalibrationOptions, PUBLISHED};
use nlgreen::frasca::{convolution_order_check, frasca_solve_with, EndpointRule, FrascaOptions, SourceFunction};
use nlgreen::kernels::{eval_kernel, kernel_residual, kernel_residual_analytic, kernel_residual_at, KernelSpec, Nonlinearity};
use nlgreen::oracle::{convergence_check, energy, reference_solve_with_slope, IvpProblem};
use nlgreen::pdelift::{chi, levelset_consistency, PdeConfig, SpaceTimeGrid};
use nlgreen::TimeGrid;
use rand::{Rng, SeedableRng};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// Closed forms: residual < 1e-4 on [0.01, 2] at dt = 1e-4, and the
/// central-difference residual shrinks 3.4–4.6× when h halves. The halving
/// runs at h = 4e-3 → 2e-3: below that the advective kernel's small
/// truncation term sinks into rounding and the ratio stops measuring order.
fn criterion_1() -> Verdict {
    let start = Instant::now();
    let grid = TimeGrid::new(0.01, 1e-4, 19_901).unwrap();
    let points: Vec<f64> = (0..100).map(|k| 0.02 + 1.98 * k as f64 / 99.0).collect();
    let mut pass = true;
    let mut notes = Vec::new();
    for nl in Nonlinearity::ALL {
        let spec = KernelSpec::standard(nl);
        let analytic = kernel_residual_analytic(&spec, &grid).unwrap();
        let fd = kernel_residual(&spec, &grid).unwrap();
        let coarse = kernel_residual_at(&spec, &points, 4e-3).unwrap();
        let fine = kernel_residual_at(&spec, &points, 2e-3).unwrap();
        let ratio = coarse / fine;
        let ok = analytic < 1e-4 && (3.4..=4.6).contains(&ratio);
        pass &= ok;
        notes.push(format!("{nl}: res {analytic:.1e} (fd {fd:.1e}) ratio {ratio:.2}"));
    }
    let elapsed = start.elapsed();
    pass &= within(elapsed, 10.0);
    verdict(pass, format!("{} [{:.2}s]", notes.join("; "), elapsed.as_secs_f64()))
}

fn table_grid() -> TimeGrid {
    TimeGrid::from_horizon(1.0, 1e-3).unwrap()
}

/// δ source at the published (s1, s2) = (1, 2): max Er ≤ −5.
fn criterion_2() -> Verdict {
    let start = Instant::now();
    let row = PUBLISHED[0];
    let cal = Calibration::prepare(
        &kernel_for(Nonlinearity::Exponential, row.s1).unwrap(),
        &row.source,
        &table_grid(),
        &CalibrationOptions::default(),
    )
    .unwrap();
    let report = cal.report(row.s2, false).unwrap();
    let elapsed = start.elapsed();
    verdict(
        report.max_er <= -5.0 && within(elapsed, 5.0),
        format!(
            "Er in [{:.2}, {:.2}] (published [{}, {}]) [{:.2}s]",
            report.min_er,
            report.max_er,
            row.min_er,
            row.max_er,
            elapsed.as_secs_f64()
        ),
    )
}

/// Every other row: the optimum beats the published s2 and its max Er is
/// within 1.5 decades of the published one.
fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for row in &PUBLISHED[1..] {
        let cal = Calibration::prepare(
            &kernel_for(Nonlinearity::Exponential, row.s1).unwrap(),
            &row.source,
            &table_grid(),
            &CalibrationOptions::default(),
        )
        .unwrap();
        let bracket = default_bracket(row.s2);
        let (s2, report) = cal.optimize(bracket, &[row.s2]).unwrap();
        let dominates = report.objective <= cal.objective(row.s2);
        let band = report.max_er <= row.max_er + 1.5;
        pass &= dominates && band;
        notes.push(format!(
            "{}: s2* {s2:.4} max Er {:.2} (published {}){}",
            row.source,
            report.max_er,
            row.max_er,
            if dominates { "" } else { " NOT DOMINANT" }
        ));
    }
    let elapsed = start.elapsed();
    pass &= within(elapsed, 60.0);
    verdict(pass, format!("{} [{:.2}s]", notes.join("; "), elapsed.as_secs_f64()))
}

/// RK4 order on (exponential, sin) and energy drift of the free cubic oscillator.
fn criterion_4() -> Verdict {
    let grid = TimeGrid::from_horizon(1.0, 1e-2).unwrap();
    let order = convergence_check(&IvpProblem::new(Nonlinearity::Exponential, SourceFunction::Sine), &grid)
        .unwrap()
        .order
        .unwrap_or(f64::NAN);

    let long = TimeGrid::from_horizon(10.0, 1e-2).unwrap();
    let p = IvpProblem::new(Nonlinearity::Cubic, SourceFunction::zero())
        .with_initial(0.0, 1.0)
        .with_tolerance(1e-10);
    let (w, v) = reference_solve_with_slope(&p, &long).unwrap();
    let e0 = energy(Nonlinearity::Cubic, 0.0, 1.0).unwrap();
    let drift = w
        .values
        .iter()
        .zip(&v)
        .map(|(&w, &v)| (energy(Nonlinearity::Cubic, w, v).unwrap() - e0).abs())
        .fold(0.0, f64::max);
    verdict(
        (3.6..=4.4).contains(&order) && drift < 1e-8,
        format!("order {order:.3}, energy drift {drift:.1e}"),
    )
}

/// Trapezoid order on smooth sources; delta sifting equals the closed composition exactly.
fn criterion_5() -> Verdict {
    let spec = KernelSpec::standard(Nonlinearity::Exponential);
    let grid = TimeGrid::from_horizon(1.0, 1e-2).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for f in [
        SourceFunction::step(),
        SourceFunction::Sine,
        SourceFunction::Exponential,
        SourceFunction::CubicPoly([1.0; 4]),
        SourceFunction::LogShift,
    ] {
        let order = convolution_order_check(&spec, &f, &grid).unwrap().order.unwrap_or(f64::NAN);
        pass &= (1.8..=2.2).contains(&order);
        notes.push(format!("{f} {order:.3}"));
    }

    let fine = table_grid();
    let mut exact = true;
    for (rule, weight) in [(EndpointRule::Full, 1.0), (EndpointRule::Half, 0.5)] {
        let options = FrascaOptions {
            delta_endpoint: rule,
            ..Default::default()
        };
        let w = frasca_solve_with(&spec, &SourceFunction::delta(), 2.0, &fine, &options).unwrap();
        exact &= w.iter().all(|(t, v)| v == 2.0 * weight * eval_kernel(&spec, t).unwrap());
    }
    let shifted = SourceFunction::Delta {
        amplitude: 1.5,
        location: 0.25,
    };
    let w = frasca_solve_with(&spec, &shifted, 2.0, &fine, &FrascaOptions::default()).unwrap();
    exact &= w.iter().all(|(t, v)| v == 2.0 * 1.5 * eval_kernel(&spec, t - 0.25).unwrap());
    pass &= exact;
    notes.push(format!("sifting exact: {exact}"));
    verdict(pass, notes.join(", "))
}

/// Level-set constancy for ten χ0 and the χ specialization at 10⁴ random points.
fn criterion_6() -> Verdict {
    let cfg = PdeConfig::wave_exp();
    let spec = KernelSpec::standard(Nonlinearity::Exponential);
    let grid = SpaceTimeGrid::new(-3.0, 0.01, 601, 0.0, 0.01, 301).unwrap();
    let worst = (0..10)
        .map(|k| {
            let chi0 = 0.1 + 0.1 * k as f64;
            levelset_consistency(&spec, &cfg, chi0, 10, &grid).unwrap()
        })
        .fold(0.0, f64::max);

    let mut rng = rand::rngs::StdRng::seed_from_u64(20_240_601);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let x: f64 = rng.gen_range(-2.0..2.0);
        let t: f64 = rng.gen_range(0.0..1.0) * (-x).exp();
        let direct = (-2.0 * x).exp() - t * t;
        if chi(x, t, &cfg) != Some(direct.sqrt()) {
            mismatches += 1;
        }
    }
    verdict(
        worst < 1e-10 && mismatches == 0,
        format!("max level-set spread {worst:.1e}, specialization mismatches {mismatches}/10000"),
    )
}

/// `table1` twice under one config: byte-identical CSV.
fn criterion_7() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> Vec<u8> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_nlgreen"))
            .args(["table1", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(Path::new(&out).join("table1.csv")).unwrap()
    };
    let (a, b) = (run("first"), run("second"));
    verdict(!a.is_empty() && a == b, format!("{} bytes, identical: {}", a.len(), a == b))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("kernel residuals", criterion_1),
        ("delta-source reproduction", criterion_2),
        ("feasible-point dominance", criterion_3),
        ("oracle order and energy", criterion_4),
        ("convolution order and sifting", criterion_5),
        ("separation property", criterion_6),
        ("determinism", criterion_7),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        println!("criterion {} ({name}): {} — {}", k + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        println!("{failed} of 7 criteria failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
