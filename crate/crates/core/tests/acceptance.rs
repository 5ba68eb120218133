//! One test per acceptance criterion. Each prints a `PASS`/`FAIL` line
//! straight to stdout, so the lines appear even when output is captured.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wright_stability::bounds::{
    contraction_certificate, lemma_a_pm, lemma_l, lemma_l_box_max, verify_a_decreasing, verify_a_minus_r,
    verify_b_gt_r, verify_comparison, verify_d_gt_r, verify_jensen, AuxCurves, RationalBound,
};
use wright_stability::cli::commands::canonical_function;
use wright_stability::dde::{
    integrate, omega_amplitude, return_map_fk, seeded_constant_histories, verify_mm_inequalities, History, M_GT_D,
    M_GT_R_HALF,
};
use wright_stability::hypotheses::ScanDomain;
use wright_stability::jets::{Expr, SmoothFunction};
use wright_stability::models::{allee, allee_equilibrium, food_limitation, wright};

const L_CORNER: f64 = -0.0006945;
const L_TOL: f64 = 1e-6;
const A_PLUS_AT_MINUS_THREE_HALVES: f64 = -1.29991;
const A_PLUS_TOL: f64 = 1e-4;
const SCHWARZIAN_TOL: f64 = 1e-9;
const MOBIUS_TOL: f64 = 1e-10;
const SLOPE_FD_TOL: f64 = 1e-6;
const X2_TOL: f64 = 1e-9;
const HAND_TOL: f64 = 1e-10;
const MIN_ORDER: f64 = 3.8;
const F1_TOL: f64 = 1e-9;
const SETTLED: f64 = 1e-3;
const SUSTAINED: f64 = 0.1;
const WINDOW_AGREEMENT: f64 = 1e-3;
const MODEL_TOL: f64 = 1e-12;

fn report(n: u32, pass: bool, detail: String) {
    let line = format!("{} criterion {n}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn within(t: Instant, limit: f64) -> (bool, f64) {
    let s = t.elapsed().as_secs_f64();
    (s < limit, s)
}

#[test]
fn criterion_01_l_corner_value_and_box_maximum() {
    let t = Instant::now();
    let corner = lemma_l(-1.25, -1.0).unwrap();
    let bm = lemma_l_box_max(400).unwrap();
    let (fast, secs) = within(t, 1.0);
    let pass = (corner - L_CORNER).abs() <= L_TOL && bm.max < 0.0 && bm.zeta == -1.25 && bm.s == -1.0 && fast;
    report(
        1,
        pass,
        format!(
            "L(-1.25,-1) = {corner:.12} (target {L_CORNER} +- {L_TOL:e}); box max {:.6e} at ({}, {}) over {} points; {secs:.3}s",
            bm.max, bm.zeta, bm.s, bm.points
        ),
    );
}

#[test]
fn criterion_02_a_plus_at_minus_three_halves() {
    let (a_minus, a_plus) = lemma_a_pm(-1.5).unwrap();
    let pass = (a_plus - A_PLUS_AT_MINUS_THREE_HALVES).abs() <= A_PLUS_TOL;
    report(
        2,
        pass,
        format!(
            "A+(-1.5) = {a_plus:.10} (target {A_PLUS_AT_MINUS_THREE_HALVES} +- {A_PLUS_TOL}); A-(-1.5) = {a_minus:.10}"
        ),
    );
}

#[test]
fn criterion_03_schwarzian_identities() {
    let xs: Vec<f64> = (0..100).map(|i| -3.0 + 6.0 * i as f64 / 99.0).collect();
    let mut worst_model = 0.0f64;
    for f in [
        wright(1.3).unwrap().f,
        food_limitation(2.0, 0.25, 1.0).unwrap().f,
        food_limitation(0.7, 2.0, 1.5).unwrap().f,
    ] {
        for &x in &xs {
            worst_model = worst_model.max((f.jet(x).unwrap().schwarzian() + 0.5).abs());
        }
    }
    let mut worst_mobius = 0.0f64;
    for (a, b) in [(-1.5, 0.75), (-1.25, 1.0), (-0.7, 0.2)] {
        let rb = RationalBound::new(a, b).unwrap();
        let r = rb.to_function();
        for i in 0..100 {
            let x = rb.mu() + 0.2 + 5.0 * i as f64 / 99.0;
            worst_mobius = worst_mobius.max(r.jet(x).unwrap().schwarzian().abs());
        }
    }
    let general =
        SmoothFunction::from_expr((Expr::c(2.0) * Expr::x() - Expr::c(1.0)) / (Expr::x() + Expr::c(5.0))).unwrap();
    for &x in &xs {
        worst_mobius = worst_mobius.max(general.jet(x).unwrap().schwarzian().abs());
    }
    let pass = worst_model <= SCHWARZIAN_TOL && worst_mobius <= MOBIUS_TOL;
    report(
        3,
        pass,
        format!("max |Sf + 1/2| = {worst_model:.2e} (tol {SCHWARZIAN_TOL:e}); max |S r| = {worst_mobius:.2e} (tol {MOBIUS_TOL:e})"),
    );
}

#[test]
fn criterion_04_slopes_at_zero_and_meeting_point() {
    let h = 1e-5;
    let mut worst_slope = 0.0f64;
    let mut worst_x2 = 0.0f64;
    for (a, b) in [(-1.5, 0.75), (-1.25, 1.0), (-1.1, 0.5)] {
        let ac = AuxCurves::from_params(a, b).unwrap();
        let da = (ac.curve_a(h).unwrap() - ac.curve_a(-h).unwrap()) / (2.0 * h);
        let db = (ac.curve_b(h).unwrap() - ac.curve_b(-h).unwrap()) / (2.0 * h);
        worst_slope = worst_slope.max((da - (a + 0.5)).abs()).max((db + 0.5 * a * a).abs());
        let x2 = (a + a * a) / b;
        worst_x2 = worst_x2.max((ac.curve_a(x2).unwrap() - ac.curve_b(x2).unwrap()).abs());
    }
    let pass = worst_slope <= SLOPE_FD_TOL && worst_x2 <= X2_TOL;
    report(
        4,
        pass,
        format!("max slope error {worst_slope:.2e} (tol {SLOPE_FD_TOL:e}); max |A(x2) - B(x2)| = {worst_x2:.2e} (tol {X2_TOL:e})"),
    );
}

#[test]
fn criterion_05_lemma_grids() {
    let t = Instant::now();
    let n = 10_000;
    let dom = ScanDomain::new(-10.0, 10.0, n).unwrap();
    let mut failures = Vec::new();
    let mut count = 0;
    for a in [-1.5, -1.4, -1.3, -1.25] {
        for b in [0.5, 1.0] {
            let f = canonical_function(a, b).unwrap();
            let rb = RationalBound::new(a, b).unwrap();
            let ac = AuxCurves::new(rb);
            let (mono, sa) = verify_a_decreasing(&ac, n).unwrap();
            let checks = [
                verify_comparison(&f, &rb, &dom).unwrap(),
                mono,
                sa,
                verify_a_minus_r(&ac, n).unwrap(),
                verify_b_gt_r(&ac, 50.0, n).unwrap(),
                verify_d_gt_r(&ac, 50.0, n).unwrap(),
                verify_jensen(&ac, 50.0, n).unwrap(),
            ];
            for c in checks {
                count += 1;
                if !c.pass {
                    failures.push(format!("{} at (a, b) = ({a}, {b})", c.name));
                }
            }
        }
    }
    let (fast, secs) = within(t, 10.0);
    report(
        5,
        failures.is_empty() && fast,
        format!(
            "{} of {count} grid checks pass at {n} points; {secs:.2}s (limit 10s) {failures:?}",
            count - failures.len()
        ),
    );
}

/// `x'(t) = -x(t-1)`, `x = 1` on `[-1, 0]`, on `[n-1, n]`:
/// `sum_{k <= n} (-1)^k (t - k + 1)^k / k!`.
fn linear_exact(t: f64) -> f64 {
    let (mut sum, mut fact, mut k) = (0.0, 1.0, 0i32);
    while t - k as f64 + 1.0 >= 0.0 {
        if k > 0 {
            fact *= k as f64;
        }
        sum += (-1f64).powi(k) * (t - k as f64 + 1.0).powi(k) / fact;
        k += 1;
    }
    sum
}

#[test]
fn criterion_06_hand_computable_integration() {
    let f = SmoothFunction::from_expr(-Expr::x()).unwrap();
    let h = History::Constant(1.0);
    let sol = integrate(&f, &h, 10.0, 256).unwrap();
    let (x1, x2) = (sol.eval(1.0), sol.eval(2.0));
    let t = 8.0;
    let errs: Vec<f64> = [16usize, 32, 64, 128]
        .iter()
        .map(|&n| (integrate(&f, &h, t, n).unwrap().eval(t) - linear_exact(t)).abs())
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let f1 = return_map_fk(&f, 1.0, 1, 20.0, 256).unwrap();
    let pass =
        x1.abs() <= HAND_TOL && (x2 + 0.5).abs() <= HAND_TOL && min_order >= MIN_ORDER && (f1 + 0.5).abs() <= F1_TOL;
    report(
        6,
        pass,
        format!("x(1) = {x1:.2e}, x(2) = {x2:.12}; orders at t = 8: {orders:.3?} (min {MIN_ORDER}); F_1(1) = {f1:.12}"),
    );
}

#[test]
fn criterion_07_global_attraction_and_certificates() {
    let t = Instant::now();
    let zs = seeded_constant_histories(42, 20, -0.9, 3.0);
    let mut worst = Vec::new();
    for p in [0.5, 1.0, 1.5] {
        let f = wright(p).unwrap().f;
        let w = zs
            .iter()
            .map(|&z| {
                integrate(&f, &History::Constant(z), 200.0, 256)
                    .unwrap()
                    .eval(200.0)
                    .abs()
            })
            .fold(0.0f64, f64::max);
        worst.push((p, w));
    }
    let c125 = contraction_certificate(-1.25, 0.625, 1.0, 10_000).unwrap();
    let c150 = contraction_certificate(-1.5, 0.75, 1.0, 10_000).unwrap();
    let (fast, secs) = within(t, 30.0);
    let settled = worst.iter().all(|&(_, w)| w < SETTLED);
    let worst: Vec<String> = worst.iter().map(|(p, w)| format!("p={p}: {w:.2e}")).collect();
    let pass = settled
        && c125.certified
        && c125.factor == 0.9765625
        && c150.certified
        && (c150.factor - 1.0).abs() < 1e-15
        && fast;
    report(
        7,
        pass,
        format!(
            "worst |x(200)| by p: {worst:?} (limit {SETTLED:e}); a=-1.25 factor {} certified {}; a=-1.5 factor {} certified {}; {secs:.2}s",
            c125.factor, c125.certified, c150.factor, c150.certified
        ),
    );
}

#[test]
fn criterion_08_sustained_oscillation_respects_bounds() {
    let f = wright(1.65).unwrap().f;
    let h = History::Constant(1.0);
    let e = omega_amplitude(&f, &h, 150.0, 50.0, 256).unwrap();
    let e2 = omega_amplitude(&f, &h, 150.0, 100.0, 256).unwrap();
    let rep = verify_mm_inequalities(&f, &e).unwrap();
    let slack = |name: &str| rep.entry(name).and_then(|en| en.slack).unwrap_or(f64::NAN);
    let (s_d, s_r) = (slack(M_GT_D), slack(M_GT_R_HALF));
    let stable = (e.m - e2.m).abs() < WINDOW_AGREEMENT && (e.big_m - e2.big_m).abs() < WINDOW_AGREEMENT;
    let pass = e.big_m > SUSTAINED && e.m < -SUSTAINED && stable && s_d > 0.0 && s_r > 0.0;
    report(
        8,
        pass,
        format!(
            "m = {:.5}, M = {:.5} (doubled window: {:.5}, {:.5}); slack m > D(M): {s_d:.4}, m > r(-r(M)/2): {s_r:.4}",
            e.m, e.big_m, e2.m, e2.big_m
        ),
    );
}

#[test]
fn criterion_09_model_cross_checks() {
    let mut worst_food = 0.0f64;
    for (r, h) in [(1.0, 1.0), (0.6, 2.0), (2.5, 0.5)] {
        let fl = food_limitation(r, 0.0, h).unwrap().f;
        let w = wright(r * h).unwrap().f;
        for i in 0..=1000 {
            let x = -5.0 + 0.01 * i as f64;
            worst_food = worst_food.max((fl.eval(x).unwrap() - w.eval(x).unwrap()).abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_allee = 0.0f64;
    for _ in 0..100 {
        let (a, b, c, h): (f64, f64, f64, f64) = (
            rng.gen_range(0.1..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.1..2.0),
        );
        let e = (b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * c);
        let oracle = (2.0 * c * e - b) * h * e;
        let m = allee(a, b, c, h).unwrap();
        let rel = (m.criterion_value - oracle).abs() / oracle.abs().max(1.0);
        let e_rel = (allee_equilibrium(a, b, c) - e).abs() / e;
        worst_allee = worst_allee.max(rel).max(e_rel);
    }
    let pass = worst_food <= MODEL_TOL && worst_allee <= MODEL_TOL;
    report(
        9,
        pass,
        format!("max |food(c=0) - wright(rh)| = {worst_food:.2e}; max relative Allee criterion error {worst_allee:.2e} (tol {MODEL_TOL:e})"),
    );
}

fn run_cli(args: &[&str], dir: &Path) -> (i32, Vec<(String, Vec<u8>)>) {
    let status = Command::new(env!("CARGO_BIN_EXE_wright"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap()
        .status;
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect()
        })
        .unwrap_or_default();
    files.sort();
    (status.code().unwrap_or(-1), files)
}

fn csv_column(bytes: &[u8], col: usize) -> Vec<String> {
    String::from_utf8_lossy(bytes)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap_or("").to_string())
        .collect()
}

#[test]
fn criterion_10_cli_determinism_and_exit_codes() {
    let cases: [(&[&str], i32); 9] = [
        (&["check", "--model", "wright", "--p", "1.0", "--format", "json"], 0),
        (&["check", "--model", "custom", "--expr", "-x", "--format", "json"], 1),
        (&["check", "--model", "wright", "--p", "-1"], 2),
        (&["certify", "--model", "wright", "--p", "1.5", "--format", "json"], 0),
        (&["certify", "--model", "wright", "--p", "1.55", "--format", "json"], 1),
        (
            &[
                "certify", "--model", "allee", "--a", "1", "--b", "0", "--c", "1", "--h", "0.5", "--format", "json",
            ],
            0,
        ),
        (
            &[
                "simulate", "--model", "custom", "--expr", "-x", "--z", "1", "--t-end", "5",
            ],
            0,
        ),
        (
            &[
                "scan", "--model", "wright", "--from", "1.3", "--to", "1.8", "--step", "0.05",
            ],
            0,
        ),
        (
            &[
                "returnmap",
                "--model",
                "wright",
                "--p",
                "1.6",
                "--z-from",
                "0.1",
                "--z-to",
                "2",
                "--k",
                "1",
            ],
            0,
        ),
    ];
    let t = Instant::now();
    let mut problems = Vec::new();
    let mut outputs = Vec::new();
    for (i, (args, want)) in cases.iter().enumerate() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let (c1, f1) = run_cli(args, d1.path());
        let (c2, f2) = run_cli(args, d2.path());
        if c1 != *want || c2 != *want {
            problems.push(format!("case {i} exit {c1}/{c2}, expected {want}"));
        }
        if f1 != f2 {
            problems.push(format!("case {i} outputs differ between runs"));
        }
        outputs.push(f1);
    }
    let file = |case: usize, name: &str| {
        outputs[case]
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.clone())
            .unwrap_or_default()
    };
    let traj = String::from_utf8(file(6, "trajectory.csv")).unwrap();
    let at_two = traj.lines().find_map(|l| {
        let (t, x) = l.split_once(',')?;
        (t.parse::<f64>().ok()? == 2.0).then(|| x.parse::<f64>().ok()).flatten()
    });
    if !matches!(at_two, Some(x) if (x + 0.5).abs() <= 1e-9) {
        problems.push(format!("simulate row t = 2 gives {at_two:?}"));
    }
    let scan = file(7, "scan.csv");
    for (p, conv) in csv_column(&scan, 0).iter().zip(csv_column(&scan, 3)) {
        let p: f64 = p.parse().unwrap();
        if (p <= 1.5 && conv != "1") || (p >= 1.65 && conv != "0") {
            problems.push(format!("scan p = {p} converged = {conv}"));
        }
    }
    let fk = csv_column(&file(8, "returnmap.csv"), 1);
    if fk.is_empty() || !fk.iter().all(|v| v.parse::<f64>().is_ok_and(|v| v < 0.0)) {
        problems.push(format!("returnmap F_1 values {fk:?}"));
    }
    let secs = Duration::as_secs_f64(&t.elapsed());
    report(
        10,
        problems.is_empty(),
        format!("9 invocations run twice each; exit codes and byte-identical outputs; {secs:.2}s {problems:?}"),
    );
}
