//! Acceptance run: one line per criterion, non-zero exit on any failure.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use relsin_core::analysis::{AnalysisOptions, PerturbationAnalysis};
use relsin_core::bounds::PNorm;
use relsin_core::io::{diag_matrix, read_mtx_file};
use relsin_core::matpair::sym_eigenvalues;
use relsin_core::penalty::{builtin_example, effectivity_sweep, KappaGrid, PairVariant, SweepConfig, SweepResult};
use relsin_core::perturb::perturb_spd;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn sweep(example: &str, variant: PairVariant) -> SweepResult {
    let family = builtin_example(example).expect("builtin family");
    effectivity_sweep(&family, &KappaGrid::default(), &SweepConfig::new(2, variant)).expect("sweep runs")
}

fn quotient_at(r: &SweepResult, kappa: f64) -> f64 {
    r.at(kappa).and_then(|p| p.quotient).unwrap_or(f64::NAN)
}

fn closed_form_eta() -> Outcome {
    let family = builtin_example("tridiag3").expect("builtin family");
    let mut worst: f64 = 0.0;
    for exp in 0..=8 {
        let kappa = 10f64.powi(exp);
        let eta = family.block_form(kappa).map(|b| b.eta_kappa).unwrap_or(f64::NAN);
        let err = (eta - (2.0 / (6.0 + 3.0 * kappa)).sqrt()).abs();
        worst = if err.is_nan() { f64::NAN } else { worst.max(err) };
    }
    verdict(worst <= 1e-12, format!("max |eta - sqrt(2/(6+3k))| = {worst:.2e} (tol 1e-12)"))
}

fn golden_asymptotics() -> Outcome {
    let k: f64 = 1e3;
    let series = [
        1.0 - 1.0 / (2.0 * k) + 3.0 / (8.0 * k.powi(2)) - 55.0 / (128.0 * k.powi(4)) + 1.0 / (2.0 * k.powi(5)),
        3.0 - 1.0 / (2.0 * k) - 3.0 / (8.0 * k.powi(2)) + 55.0 / (128.0 * k.powi(4)) + 1.0 / (2.0 * k.powi(5)),
        k + 2.0 + 1.0 / k - 1.0 / k.powi(5),
    ];
    let h = builtin_example("tridiag3").and_then(|f| f.assemble(k)).expect("assembly");
    let values = sym_eigenvalues(&h).expect("eigenvalues");
    let worst = values.iter().zip(series).map(|(v, s)| (v - s).abs()).fold(0.0, f64::max);
    verdict(worst <= 1e-12, format!("max eigenvalue deviation at kappa=1e3: {worst:.2e} (tol 1e-12)"))
}

fn rate_reproduction() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for variant in [PairVariant::IH, PairVariant::HinvH] {
        let r = sweep("tridiag3", variant);
        let (ls, rs) = (r.left_slope.unwrap_or(f64::NAN), r.right_slope.unwrap_or(f64::NAN));
        ok &= (ls + 0.5).abs() <= 0.02 && (rs + 0.5).abs() <= 0.02;
        parts.push(format!("{variant}: left {ls:.4} right {rs:.4}"));
    }
    let euclid = sweep("tridiag3", PairVariant::HI).left_slope.unwrap_or(f64::NAN);
    ok &= (euclid + 1.0).abs() <= 0.02;
    parts.push(format!("euclidean left {euclid:.4}"));
    verdict(ok, format!("{} (targets -0.5, -0.5, -1 +/- 0.02)", parts.join("; ")))
}

fn tridiag3_sharpness() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for variant in [PairVariant::HinvH, PairVariant::IH] {
        let q = quotient_at(&sweep("tridiag3", variant), 1e8);
        ok &= (0.9..=1.0).contains(&q);
        parts.push(format!("{variant}: {q:.6}"));
    }
    verdict(ok, format!("quotient at kappa=1e8 {} (range [0.9, 1])", parts.join("; ")))
}

fn tridiag4_limits() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for variant in [PairVariant::IH, PairVariant::HinvH] {
        let r = sweep("tridiag4", variant);
        let (q7, q8) = (quotient_at(&r, 1e7), quotient_at(&r, 1e8));
        let change = (q8 - q7).abs() / q7;
        ok &= change < 0.02 && q8 > 0.05;
        parts.push(format!("{variant}: q(1e8) {q8:.4}, change {:.3}%", change * 100.0));
    }
    for variant in [PairVariant::HI, PairVariant::HinvI] {
        let r = sweep("tridiag4", variant);
        let (q4, q8) = (quotient_at(&r, 1e4), quotient_at(&r, 1e8));
        ok &= q8 < 0.5 * q4 && q8 < 0.1;
        parts.push(format!("{variant}: q(1e4) {q4:.2e}, q(1e8) {q8:.2e}"));
    }
    verdict(ok, parts.join("; "))
}

fn bound_validity() -> Outcome {
    let tally = common::validity_run(1000, 1);
    let detail = format!(
        "{} instances, {} checks, {} skipped, {} violations (slack 1e-12){}",
        tally.instances,
        tally.checks,
        tally.skipped,
        tally.violations.len(),
        tally.violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
    );
    verdict(tally.instances == 1000 && tally.violations.is_empty(), detail)
}

fn measure_inequalities() -> Outcome {
    let tally = common::measure_inequality_run(500, 1);
    let detail = format!(
        "{} instances, {} checks, {} violations{}",
        tally.instances,
        tally.checks,
        tally.violations.len(),
        tally.violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
    );
    verdict(tally.instances == 500 && tally.violations.is_empty(), detail)
}

fn s1rmq4m1_path() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("RELSIN_S1RMQ4M1") {
        return Some(PathBuf::from(p));
    }
    let local = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/s1rmq4m1.mtx");
    local.exists().then_some(local)
}

fn matrix_market_reproduction() -> Outcome {
    let Some(path) = s1rmq4m1_path() else {
        return Outcome::Skip(
            "s1rmq4m1.mtx not found; set RELSIN_S1RMQ4M1 or place it in crates/core/tests/data/".into(),
        );
    };
    let h = match read_mtx_file(&path) {
        Ok(h) => h,
        Err(e) => return Outcome::Fail(format!("cannot read {}: {e}", path.display())),
    };
    let m = diag_matrix(h.dim());
    let run = || -> relsin_core::Result<PerturbationAnalysis> {
        let ht = perturb_spd(&h, 1e-8, 1)?.perturbed;
        let mt = perturb_spd(&m, 1e-8, 2)?.perturbed;
        let opts = AnalysisOptions { compute_sun: true, ..Default::default() };
        PerturbationAnalysis::run(&h, &m, &ht, &mt, 4, &opts)
    };
    match run() {
        Ok(a) => {
            let exact = a.angle_total.norm2;
            let bound = a.main_bound(PNorm::Inf).total;
            let sun = a.sun.map(|s| s.total).unwrap_or(f64::NAN);
            let ok = (1e-8..=1e-5).contains(&exact) && (1e-5..=1e-2).contains(&bound) && sun >= 1e3;
            verdict(ok, format!("n = {}, exact {exact:.3e}, bound {bound:.3e}, classical {sun:.3e}", h.dim()))
        }
        Err(e) => Outcome::Fail(format!("analysis failed: {e}")),
    }
}

fn parser_robustness() -> Outcome {
    let round_trip = common::mtx_round_trip_failures(100, 3);
    let fuzz = common::mtx_fuzz(5000, 4);
    let detail = format!(
        "100 round trips, {} failures; {} fuzzed inputs, {} rejected with line numbers, {} accepted, {} unnamed or panics",
        round_trip.len(),
        fuzz.cases,
        fuzz.rejected,
        fuzz.accepted,
        fuzz.failures.len()
    );
    verdict(round_trip.is_empty() && fuzz.failures.is_empty(), detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("1 closed-form eta", Duration::from_secs(1), closed_form_eta),
        ("2 golden asymptotics", Duration::from_secs(1), golden_asymptotics),
        ("3 rate reproduction", Duration::from_secs(5), rate_reproduction),
        ("4 tridiag3 sharpness", Duration::from_secs(5), tridiag3_sharpness),
        ("5 tridiag4 limits", Duration::from_secs(5), tridiag4_limits),
        ("6 bound validity", Duration::from_secs(60), bound_validity),
        ("7 measure inequalities", Duration::from_secs(30), measure_inequalities),
        ("8 matrix market reproduction", Duration::from_secs(600), matrix_market_reproduction),
        ("9 parser robustness", Duration::from_secs(10), parser_robustness),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let timing = format!("{:.3}s of {}s", elapsed.as_secs_f64(), limit.as_secs());
        let outcome = match outcome {
            Outcome::Pass(d) if elapsed > limit => Outcome::Fail(format!("{d}; over time budget")),
            other => other,
        };
        match outcome {
            Outcome::Pass(d) => println!("[PASS] {name}: {d} [{timing}]"),
            Outcome::Skip(d) => println!("[SKIP] {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("[FAIL] {name}: {d} [{timing}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
