//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use qslkit::dephasing::{big_gamma_analytic, dephasing_qsl, DephasingParams};
use qslkit::jc::{dq_dt, jc_qsl, q_of_t, JcParams};
use qslkit::scan::{run_scan_with_threads, Axis, Model, ScanGrid, ScanRecord};
use qslkit::special::gamma_function;
use qslkit::verify::{self, CheckReport, DEPHASING_ETA, DEPHASING_S, DEPHASING_TAU, JC_GAMMA0, JC_TAU};
use qslkit::{BlochState, QslResult, QuadratureConfig};

const SEED: u64 = verify::DEFAULT_SEED;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            lines: Vec::new(),
        }
    }

    fn report(&mut self, r: &CheckReport) {
        self.passed &= r.passed;
        self.lines.push(format!(
            "{} {}: worst {:.3e} (tol {:.0e}, {} cases){}",
            mark(r.passed),
            r.name,
            r.worst,
            r.tolerance,
            r.cases,
            if r.detail.is_empty() { String::new() } else { format!(", {}", r.detail) }
        ));
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {line}", mark(ok)));
    }

    fn runtime(&mut self, start: Instant, limit: f64) {
        let secs = start.elapsed().as_secs_f64();
        self.check(secs < limit, format!("runtime {secs:.2}s (limit {limit}s)"));
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok  "
    } else {
        "FAIL"
    }
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn jc_grid_results() -> Vec<(f64, QslResult, f64)> {
    let mut out = Vec::new();
    for g in JC_GAMMA0 {
        let p = JcParams::new(15.0, g).unwrap();
        for tau in JC_TAU {
            for s0 in verify::standard_states() {
                let m = jc_qsl(&p, &s0, tau, &quad()).unwrap();
                out.push((tau, m.result, m.closed_form));
            }
        }
    }
    out
}

fn dephasing_grid_results() -> Vec<(f64, QslResult, f64)> {
    let mut out = Vec::new();
    for eta in DEPHASING_ETA {
        for s in DEPHASING_S {
            let p = DephasingParams::new(eta, s).unwrap();
            for tau in DEPHASING_TAU {
                for s0 in verify::standard_states() {
                    let m = dephasing_qsl(&p, &s0, tau, &quad()).unwrap();
                    out.push((tau, m.result, m.closed_form));
                }
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let (states, bounds) = verify::jc_oracle(15.0, &JC_GAMMA0, &JC_TAU, &quad()).unwrap();
    o.report(&states);
    o.report(&bounds);
    o.runtime(start, 30.0);
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    for r in verify::dephasing_oracle(&DEPHASING_ETA, &DEPHASING_S, &DEPHASING_TAU, &quad()).unwrap() {
        o.report(&r);
    }
    o.runtime(start, 30.0);
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    o.report(&verify::norm_ordering(10_000, SEED));
    let results: Vec<_> = jc_grid_results().into_iter().chain(dephasing_grid_results()).collect();
    let mut bad = 0;
    for (_, r, _) in &results {
        let slack = 1e-12 * r.tau_qsl_op.max(1e-300);
        let ordered = r.tau_qsl_op + slack >= r.tau_qsl_hs && r.tau_qsl_hs + slack >= r.tau_qsl_tr;
        if !ordered || r.tau_qsl_unified != r.tau_qsl_op {
            bad += 1;
        }
    }
    o.check(
        bad == 0,
        format!("bound ordering op >= hs >= tr and unified = op: {bad} of {} results out of order", results.len()),
    );
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let tol = quad().rel_tol;
    let results: Vec<_> = jc_grid_results().into_iter().chain(dephasing_grid_results()).collect();
    let worst = results
        .iter()
        .map(|(tau, r, closed)| ((r.tau_qsl_unified.max(*closed) - tau) / tau).max(0.0))
        .fold(0.0, f64::max);
    o.check(
        worst <= tol,
        format!("bound <= tau on {} grid points: worst relative excess {worst:.3e} (tol {tol:.0e})", results.len()),
    );
    o.report(&verify::jc_random_bounds(1_000, SEED, &quad()).unwrap());
    o.report(&verify::dephasing_random_bounds(1_000, SEED, &quad()).unwrap());
    o.report(&verify::jc_derivative_bound(15.0, &JC_GAMMA0, &JC_TAU, 50).unwrap());
    o.report(&verify::dephasing_derivative_bound(&DEPHASING_ETA, &DEPHASING_S, &DEPHASING_TAU, 50).unwrap());
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    o.report(&verify::jc_pure_state(15.0, &JC_GAMMA0, &quad()).unwrap());
    o.report(&verify::dephasing_pure_state(&DEPHASING_ETA, &DEPHASING_S, &quad()).unwrap());
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    o.report(&verify::factorization(&DEPHASING_ETA, &DEPHASING_S, &quad()).unwrap());
    o
}

fn jc_panel(axis: Axis, fixed: (&str, f64)) -> ScanGrid {
    ScanGrid {
        model: Model::Jc,
        axis1: Axis::linear("gamma0", 2.5, 50.0, 20),
        axis2: axis,
        fixed: BTreeMap::from([("lambda".into(), 15.0), (fixed.0.into(), fixed.1)]),
        tau: 1.0,
    }
}

/// Counts decreases along the inner axis at each outer-axis value. A drop
/// smaller than the quadrature tolerance is not counted.
fn trend_violations(records: &[ScanRecord], inner: usize) -> (usize, String) {
    let tol = quad().rel_tol;
    let mut count = 0;
    let mut first = String::new();
    for row in records.chunks(inner) {
        for w in row.windows(2) {
            let (Some(a), Some(b)) = (w[0].result, w[1].result) else {
                continue;
            };
            if b.tau_qsl_unified < a.tau_qsl_unified - tol * a.tau_qsl_unified {
                if first.is_empty() {
                    first = format!(
                        "; first at gamma0={} {}: {:.6} -> {:.6} ({} {:.4} -> {:.4})",
                        w[0].axis1_value,
                        w[0].axis2_name,
                        a.tau_qsl_unified,
                        b.tau_qsl_unified,
                        w[0].axis2_name,
                        w[0].axis2_value,
                        w[1].axis2_value
                    );
                }
                count += 1;
            }
        }
    }
    (count, first)
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let panels = [
        ("(a) C axis, sz=0", jc_panel(Axis::linear("coherence", 0.0, 1.0, 20), ("sz", 0.0))),
        ("(b) sz axis, C=0", jc_panel(Axis::linear("sz", -1.0, 1.0, 20), ("coherence", 0.0))),
        ("(c) C axis, sz=0.6", jc_panel(Axis::linear("coherence", 0.0, 0.8, 20), ("sz", 0.6))),
        ("(d) sz axis, C=0.6", jc_panel(Axis::linear("sz", -0.8, 0.8, 20), ("coherence", 0.6))),
    ];
    for (label, grid) in &panels {
        let records = run_scan_with_threads(grid, &quad(), None).unwrap();
        let (n, first) = trend_violations(&records, grid.axis2.count);
        o.check(n == 0, format!("panel {label}: {n} decreases along the state axis{first}"));

        let weak = JcParams::new(15.0, 1.0).unwrap();
        let strong = JcParams::new(15.0, 40.0).unwrap();
        let mut slower = Vec::new();
        for v in grid.axis2.values() {
            let (c, sz) = match grid.axis2.name.as_str() {
                "coherence" => (v, grid.fixed["sz"]),
                _ => (grid.fixed["coherence"], v),
            };
            let s0 = BlochState::from_coherence(c, 0.0, sz).unwrap();
            let a = jc_qsl(&weak, &s0, 1.0, &quad()).unwrap().result.tau_qsl_unified;
            let b = jc_qsl(&strong, &s0, 1.0, &quad()).unwrap().result.tau_qsl_unified;
            if !(b < a) {
                slower.push(format!("C={c:.3} sz={sz:.3}: {b:.6} vs {a:.6}"));
            }
        }
        o.check(
            slower.is_empty(),
            format!(
                "panel {label}: tau_qsl(gamma0=40) < tau_qsl(gamma0=1) fails at {} of {} states{}",
                slower.len(),
                grid.axis2.count,
                slower.first().map(|s| format!("; first {s}")).unwrap_or_default()
            ),
        );
    }

    let fig2 = ScanGrid {
        model: Model::Jc,
        axis1: Axis::linear("coherence", 0.0, 1.0, 20),
        axis2: Axis::linear("sz", -1.0, 1.0, 20),
        fixed: BTreeMap::from([("lambda".into(), 15.0), ("gamma0".into(), 40.0)]),
        tau: 1.0,
    };
    let records = run_scan_with_threads(&fig2, &quad(), None).unwrap();
    let mismatched = records
        .iter()
        .filter(|r| r.infeasible != (r.coherence.powi(2) + r.sz.powi(2) > 1.0))
        .count();
    let flagged = records.iter().filter(|r| r.infeasible).count();
    o.check(
        mismatched == 0 && records.len() == 400,
        format!("fig. 2 surface: {flagged} infeasible cells flagged, {mismatched} mismatches"),
    );
    o.runtime(start, 60.0);
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let g1 = (gamma_function(1.0).unwrap() - 1.0).abs();
    let gh = (gamma_function(0.5).unwrap() - PI.sqrt()).abs() / PI.sqrt();
    o.check(g1 <= 1e-12 && gh <= 1e-12, format!("gamma(1) error {g1:.1e}, gamma(1/2) error {gh:.1e} (tol 1e-12)"));

    let mut worst: f64 = 0.0;
    for eta in [0.5, 1.0, 2.0] {
        let p = DephasingParams::new(eta, 2.0).unwrap();
        for tau in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let v = big_gamma_analytic(&p, tau).unwrap();
            worst = worst.max((v - eta * tau * tau / (1.0 + tau * tau)).abs());
        }
    }
    o.check(worst <= 1e-10, format!("s=2 dephasing factor vs eta tau^2/(1+tau^2): worst {worst:.1e} (tol 1e-10)"));

    let mut seam: f64 = 0.0;
    for tau in [0.5, 1.0, 2.0] {
        let limit = 0.5 * (1.0 + tau * tau as f64).ln();
        for ds in [-2e-6, -1e-6, -5e-7, 5e-7, 1e-6, 2e-6] {
            let p = DephasingParams::new(1.0, 1.0 + ds).unwrap();
            seam = seam.max((big_gamma_analytic(&p, tau).unwrap() - limit).abs());
        }
    }
    o.check(seam <= 1e-4, format!("s=1 seam: worst jump {seam:.1e} (tol 1e-4)"));

    let crit = JcParams::new(15.0, 7.5).unwrap();
    let s0 = BlochState::new(0.6, 0.0, 0.6).unwrap();
    let mut branch: f64 = 0.0;
    // offsets straddle the width of the critical window
    for eps in [2e-9, 1e-8, 1e-6] {
        for g in [7.5 * (1.0 - eps), 7.5 * (1.0 + eps)] {
            let p = JcParams::new(15.0, g).unwrap();
            for t in [0.1, 0.5, 1.0, 3.0] {
                branch = branch.max((q_of_t(&p, t) - q_of_t(&crit, t)).abs());
                branch = branch.max((dq_dt(&p, t) - dq_dt(&crit, t)).abs());
            }
            let a = jc_qsl(&p, &s0, 1.0, &quad()).unwrap().closed_form;
            let b = jc_qsl(&crit, &s0, 1.0, &quad()).unwrap().closed_form;
            branch = branch.max((a - b).abs());
        }
    }
    o.check(branch <= 1e-4, format!("jc branch continuity at 2 gamma0 = lambda: worst jump {branch:.1e} (tol 1e-4)"));
    o
}

fn scan_bytes(threads: &str, path: &std::path::Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_qslkit"))
        .args([
            "scan", "--model", "jc", "--axis1", "coherence:0:1:12", "--axis2", "gamma0:0.5:50:12", "--sz", "0",
            "--lambda", "15", "--tau", "1", "-o",
        ])
        .arg(path)
        .env("QSLKIT_THREADS", threads)
        .output()
        .expect("qslkit binary runs");
    assert!(status.status.success(), "scan failed: {}", String::from_utf8_lossy(&status.stderr));
    std::fs::read(path).unwrap()
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let dir = std::env::temp_dir().join(format!("qslkit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = scan_bytes("1", &dir.join("a.csv"));
    let b = scan_bytes("1", &dir.join("b.csv"));
    let c = scan_bytes("4", &dir.join("c.csv"));
    let d = scan_bytes("0", &dir.join("d.csv"));
    std::fs::remove_dir_all(&dir).ok();
    o.check(a == b, format!("repeated runs byte-identical ({} bytes)", a.len()));
    o.check(a == c && a == d, "QSLKIT_THREADS=1, 4 and automatic give identical bytes".to_string());
    o
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle closure, damped Jaynes-Cummings", criterion_1),
        ("oracle closure, dephasing", criterion_2),
        ("norm ordering", criterion_3),
        ("bound validity", criterion_4),
        ("pure-state reductions", criterion_5),
        ("factorization law", criterion_6),
        ("figure trends", criterion_7),
        ("special values", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        println!(
            "[{}] criterion {}: {name} ({:.1}s)",
            if outcome.passed { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
        for line in &outcome.lines {
            println!("       {line}");
        }
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("\n{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
