//! The six subcommands. Each returns exit code 0 or 1; errors map to 2.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{CommandKind, Format, ModelKind, RunConfig, Settings};
use super::output::{num, opt_num, write_csv, write_json, Csv};
use crate::bounds::{
    contraction_certificate, in_slope_window, lemma_a_pm, lemma_l, lemma_l_box_max, linear_case_bounds,
    verify_a_decreasing, verify_a_minus_r, verify_b_gt_r, verify_comparison, verify_d_gt_r, verify_jensen, AuxCurves,
    GridCheck, RationalBound, ZETA_RANGE,
};
use crate::dde::{amplitude_of, extrema_between, integrate, return_map_fk, seeded_constant_histories, History};
use crate::grid::uniform;
use crate::hypotheses::{check_hypotheses, HypothesisReport, ScanDomain};
use crate::jets::{deriv_tolerance, parse_expr, Expr, SmoothFunction};
use crate::models::{self, ModelSpec, CRITERION_THRESHOLD};
use crate::{Error, Result};

pub fn execute(cfg: &RunConfig) -> Result<i32> {
    match cfg.command {
        CommandKind::Check => check(cfg),
        CommandKind::Certify => certify(cfg),
        CommandKind::Simulate => simulate(cfg),
        CommandKind::Returnmap => returnmap(cfg),
        CommandKind::Scan => scan(cfg),
        CommandKind::VerifyLemmas => verify_lemmas(cfg),
    }
}

/// Builds the configured model; `--model` defaults to `wright`.
pub fn build_model(s: &Settings) -> Result<ModelSpec> {
    match s.model.unwrap_or(ModelKind::Wright) {
        ModelKind::Wright => models::wright(s.p.unwrap_or(1.0)),
        ModelKind::FoodLimitation => {
            models::food_limitation(s.r.unwrap_or(1.0), s.c.unwrap_or(0.0), s.h.unwrap_or(1.0))
        }
        ModelKind::Allee => models::allee(
            s.a.unwrap_or(1.0),
            s.b.unwrap_or(0.0),
            s.c.unwrap_or(1.0),
            s.h.unwrap_or(1.0),
        ),
        ModelKind::Custom => {
            let src = s
                .expr
                .as_deref()
                .ok_or_else(|| Error::Config("--model custom needs --expr".into()))?;
            let expr = parse_expr(src)?;
            let bound = [("p", s.p), ("r", s.r), ("c", s.c), ("a", s.a), ("b", s.b), ("h", s.h)]
                .into_iter()
                .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)));
            models::custom(SmoothFunction::new(expr, bound)?)
        }
    }
}

fn describe(m: &ModelSpec) -> String {
    let params: Vec<String> = m.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    if params.is_empty() {
        format!("{} f(x) = {}", m.name.as_str(), m.f.expr())
    } else {
        format!("{} ({})", m.name.as_str(), params.join(", "))
    }
}

fn domain(cfg: &RunConfig) -> Result<ScanDomain> {
    ScanDomain::new(cfg.grid_lo(), cfg.grid_hi(), cfg.grid_n())
}

fn pass_word(p: bool) -> &'static str {
    if p {
        "pass"
    } else {
        "FAIL"
    }
}

fn print_report(r: &HypothesisReport) {
    println!("{}", r.evidence);
    let w = |x: Option<f64>| x.map(|x| format!(" (witness x = {x})")).unwrap_or_default();
    println!("H1 {}{}", pass_word(r.h1.pass), w(r.h1.witness));
    let crit = match r.h2.critical_point {
        Some(c) => format!("critical point x* = {c}"),
        None => "no critical point".to_string(),
    };
    println!(
        "H2 {} ({crit}, min f = {}){}",
        pass_word(r.h2.pass),
        r.h2.min_value,
        w(r.h2.witness)
    );
    println!("H3 {}{}", pass_word(r.h3.pass), w(r.h3.witness));
    let shape = r
        .shape
        .map(|s| s.to_string())
        .unwrap_or_else(|| "undetermined (f''(0) = 0)".into());
    let infl = if r.inflexions.is_empty() {
        "none".to_string()
    } else {
        r.inflexions
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!(
        "shape {shape}; f'(0) = {}, f''(0) = {}; inflexions: {infl}",
        r.f1_0, r.f2_0
    );
}

fn run_check(f: &SmoothFunction, dom: &ScanDomain) -> Result<Option<HypothesisReport>> {
    match check_hypotheses(f, dom) {
        Ok(r) => Ok(Some(r)),
        Err(Error::Inconclusive(msg)) => {
            println!("inconclusive: {msg}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn check(cfg: &RunConfig) -> Result<i32> {
    let model = build_model(&cfg.settings)?;
    let dom = domain(cfg)?;
    println!("model {}", describe(&model));
    let Some(rep) = run_check(&model.f, &dom)? else {
        return Ok(1);
    };
    print_report(&rep);
    if cfg.format() == Format::Json {
        write_json(
            &cfg.out_dir(),
            "check.json",
            "check",
            json!({ "model": model.name.as_str(), "report": rep }),
        )?;
    }
    Ok(if rep.all_pass() { 0 } else { 1 })
}

fn certify(cfg: &RunConfig) -> Result<i32> {
    let model = build_model(&cfg.settings)?;
    let dom = domain(cfg)?;
    println!("model {}", describe(&model));
    println!(
        "criterion value {} vs threshold {CRITERION_THRESHOLD}",
        model.criterion_value
    );
    let Some(rep) = run_check(&model.f, &dom)? else {
        return Ok(1);
    };
    let mut doc =
        json!({ "model": model.name.as_str(), "criterionValue": model.criterion_value, "slope0": model.slope0 });
    let finish = |doc: Value, certified: bool| -> Result<i32> {
        let mut doc = doc;
        doc["certified"] = json!(certified);
        if cfg.format() == Format::Json {
            write_json(&cfg.out_dir(), "certify.json", "certify", doc)?;
        }
        println!("{}", if certified { "certified" } else { "not certified" });
        Ok(if certified { 0 } else { 1 })
    };
    if !rep.all_pass() {
        print_report(&rep);
        println!("the hypotheses fail on the scan window");
        return finish(doc, false);
    }
    let a = rep.f1_0;
    if -a > CRITERION_THRESHOLD + 1e-12 {
        println!("-f'(0) = {} exceeds {CRITERION_THRESHOLD}", -a);
        if -a < FRAC_PI_2 {
            println!(
                "{} lies in the conjecture window ({CRITERION_THRESHOLD}, pi/2 = {FRAC_PI_2:.4}): global attraction is expected but not covered by the 3/2 condition",
                -a
            );
        }
        return finish(doc, false);
    }
    let f2 = rep.f2_0;
    if f2.abs() <= deriv_tolerance(a) {
        let lin = linear_case_bounds(a, cfg.m0(), -cfg.m0())?;
        println!(
            "f''(0) = 0: linear bounds, factors (a+1/2)^2 = {}, |a|^3/2 = {}",
            lin.factor_a, lin.factor_lambda
        );
        doc["linear"] = json!(lin);
        return finish(doc, lin.contracts);
    }
    let (g, gdom) = if f2 < 0.0 {
        println!("f''(0) < 0: working with -f(-x)");
        (model.f.reflect(), dom.reflected())
    } else {
        (model.f.clone(), dom)
    };
    let rb = RationalBound::from_jet(&g.jet(0.0)?)?;
    let ac = AuxCurves::new(rb);
    let comparison = verify_comparison(&g, &rb, &gdom)?;
    println!("comparison with r: {}", pass_word(comparison.pass));
    let mut ok = comparison.pass;
    if in_slope_window(rb.a) {
        let dr = verify_d_gt_r(&ac, cfg.x_max(), cfg.points())?;
        println!("D > R on (0, {}]: {}", cfg.x_max(), pass_word(dr.pass));
        ok &= dr.pass;
        doc["dGreaterR"] = json!(dr);
    }
    let cert = contraction_certificate(rb.a, rb.b, cfg.m0(), cfg.max_iter())?;
    println!(
        "bound map {}: factor {}, {} after {} iterations (M = {:e})",
        cert.map.describe(),
        cert.factor,
        if cert.certified {
            "contracts"
        } else {
            "does not contract"
        },
        cert.iterations,
        cert.final_value
    );
    ok &= cert.certified;
    doc["comparison"] = json!(comparison);
    doc["certificate"] = json!(cert);
    finish(doc, ok)
}

fn simulate(cfg: &RunConfig) -> Result<i32> {
    let model = build_model(&cfg.settings)?;
    let n = cfg.steps_per_unit();
    let hist = History::Constant(cfg.z());
    let sol = integrate(&model.f, &hist, cfg.t_end(), n)?;
    let extrema = extrema_between(&sol, 0.0, sol.t_end())?;
    let out = cfg.out_dir();

    let mut traj: Vec<(f64, f64)> = (0..n)
        .map(|i| -1.0 + i as f64 / n as f64)
        .map(|t| (t, hist.eval(t)))
        .collect();
    traj.extend(sol.nodes().iter().enumerate().map(|(i, &x)| (sol.time(i), x)));

    let dissipation = if cfg.histories() > 0 {
        let zs = seeded_constant_histories(cfg.seed(), cfg.histories(), -0.9, 3.0);
        let t_end = sol.t_end();
        let rows = zs
            .par_iter()
            .map(|&z| {
                let s = integrate(&model.f, &History::Constant(z), t_end, n)?;
                let first = ((t_end / 2.0) * n as f64) as usize;
                let sup = s.nodes()[first..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
                Ok((z, s.eval(t_end), sup))
            })
            .collect::<Result<Vec<_>>>()?;
        Some(rows)
    } else {
        None
    };

    match cfg.format() {
        Format::Csv => {
            let mut c = Csv::new(&["t", "x"]);
            for &(t, x) in &traj {
                c.row([num(t), num(x)]);
            }
            write_csv(&out, "trajectory.csv", &c)?;
            let mut c = Csv::new(&["index", "t", "x", "kind"]);
            for e in &extrema {
                c.row([e.index.to_string(), num(e.t), num(e.x), e.kind.as_str().to_string()]);
            }
            write_csv(&out, "extrema.csv", &c)?;
            if let Some(rows) = &dissipation {
                let mut c = Csv::new(&["z", "xEnd", "supAbs"]);
                for &(z, xe, sup) in rows {
                    c.row([num(z), num(xe), num(sup)]);
                }
                write_csv(&out, "dissipativity.csv", &c)?;
            }
        }
        Format::Json => {
            let traj: Vec<[f64; 2]> = traj.iter().map(|&(t, x)| [t, x]).collect();
            let mut body = json!({ "model": model.name.as_str(), "trajectory": traj, "extrema": extrema });
            if let Some(rows) = &dissipation {
                body["dissipativity"] = json!(rows
                    .iter()
                    .map(|&(z, xe, sup)| json!({ "z": z, "xEnd": xe, "supAbs": sup }))
                    .collect::<Vec<_>>());
            }
            write_json(&out, "simulate.json", "simulate", body)?;
        }
    }
    println!(
        "x({}) = {:e}; {} extrema; output in {}",
        sol.t_end(),
        sol.eval(sol.t_end()),
        extrema.len(),
        out.display()
    );
    Ok(0)
}

fn returnmap(cfg: &RunConfig) -> Result<i32> {
    let model = build_model(&cfg.settings)?;
    let count = cfg.z_count().max(1);
    let zs = if count == 1 {
        vec![cfg.z_from()]
    } else {
        uniform(cfg.z_from(), cfg.z_to(), count)
    };
    let (k, t_end, n) = (cfg.k(), cfg.t_end(), cfg.steps_per_unit());
    let values = zs
        .par_iter()
        .map(|&z| match return_map_fk(&model.f, z, k, t_end, n) {
            Ok(v) => Ok(Some(v)),
            Err(Error::NoExtremum { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let out = cfg.out_dir();
    match cfg.format() {
        Format::Csv => {
            let mut c = Csv::new(&["z", "Fk"]);
            for (z, v) in zs.iter().zip(&values) {
                c.row([num(*z), opt_num(*v)]);
            }
            write_csv(&out, "returnmap.csv", &c)?;
        }
        Format::Json => {
            let rows: Vec<Value> = zs
                .iter()
                .zip(&values)
                .map(|(z, v)| json!({ "z": z, "Fk": v }))
                .collect();
            write_json(&out, "returnmap.json", "returnmap", json!({ "k": k, "rows": rows }))?;
        }
    }
    let missing = values.iter().filter(|v| v.is_none()).count();
    println!(
        "F_{k} at {} points ({missing} without extremum number {k}); output in {}",
        zs.len(),
        out.display()
    );
    Ok(0)
}

fn set_param(s: &mut Settings, name: &str, v: f64) -> Result<()> {
    let slot = match name {
        "p" => &mut s.p,
        "r" => &mut s.r,
        "c" => &mut s.c,
        "a" => &mut s.a,
        "b" => &mut s.b,
        "h" => &mut s.h,
        _ => return Err(Error::Config(format!("cannot scan parameter '{name}'"))),
    };
    *slot = Some(v);
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub param: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub converged: bool,
    #[serde(rename = "firstExtremumT")]
    pub first_extremum_t: Option<f64>,
}

/// Parameter values `from, from + step, ...` up to `to`, rounded to 12
/// decimals so that printed values are clean.
pub fn scan_values(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(to >= from) {
        return Err(Error::Config(format!("bad scan range {from}..{to} step {step}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn scan(cfg: &RunConfig) -> Result<i32> {
    let name = cfg.param();
    let values = scan_values(cfg.from(), cfg.to(), cfg.step())?;
    let (transient, window, n) = (cfg.transient(), cfg.window(), cfg.steps_per_unit());
    let hist = History::Constant(cfg.z());
    let rows = values
        .par_iter()
        .map(|&v| {
            let mut s = cfg.settings.clone();
            set_param(&mut s, &name, v)?;
            let model = build_model(&s)?;
            let sol = integrate(&model.f, &hist, transient + window, n)?;
            let est = amplitude_of(&sol, transient, window)?;
            let first = extrema_between(&sol, 0.0, sol.t_end())?.first().map(|e| e.t);
            Ok(ScanRow {
                param: v,
                m: est.m,
                big_m: est.big_m,
                converged: est.converged(),
                first_extremum_t: first,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = cfg.out_dir();
    match cfg.format() {
        Format::Csv => {
            let mut c = Csv::new(&["param", "m", "M", "converged", "firstExtremumT"]);
            for r in &rows {
                c.row([
                    num(r.param),
                    num(r.m),
                    num(r.big_m),
                    (r.converged as u8).to_string(),
                    opt_num(r.first_extremum_t),
                ]);
            }
            write_csv(&out, "scan.csv", &c)?;
        }
        Format::Json => {
            write_json(&out, "scan.json", "scan", json!({ "param": name, "rows": rows }))?;
        }
    }
    for r in &rows {
        println!(
            "{name} = {}: m = {:e}, M = {:e}, {}",
            r.param,
            r.m,
            r.big_m,
            if r.converged { "converged" } else { "oscillating" }
        );
    }
    Ok(0)
}

/// One line of the lemma report.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaEntry {
    pub lemma: String,
    pub pass: bool,
    pub skipped: bool,
    pub note: Option<String>,
    #[serde(rename = "maxViolation")]
    pub max_violation: Option<f64>,
    pub witness: Value,
    pub value: Option<f64>,
    pub points: Option<usize>,
}

impl LemmaEntry {
    fn from_grid(c: GridCheck) -> Self {
        Self {
            lemma: c.name,
            pass: c.pass,
            skipped: false,
            note: None,
            max_violation: Some(c.max_violation),
            witness: json!(c.witness),
            value: Some(c.min_slack),
            points: Some(c.points),
        }
    }

    fn skipped(name: &str, note: &str) -> Self {
        Self {
            lemma: name.to_string(),
            pass: true,
            skipped: true,
            note: Some(format!("skipped: {note}")),
            max_violation: None,
            witness: Value::Null,
            value: None,
            points: None,
        }
    }

    fn value(name: &str, pass: bool, value: f64, witness: Value) -> Self {
        Self {
            lemma: name.to_string(),
            pass,
            skipped: false,
            note: None,
            max_violation: None,
            witness,
            value: Some(value),
            points: None,
        }
    }
}

pub const L_CORNER_VALUE: f64 = -0.0006945;
pub const A_PLUS_SAMPLES: usize = 50;

/// `f(x) = (a^2 / 2b)(exp(2 b x / a) - 1)`: `f'(0) = a`, `f''(0) = 2b`, `Sf < 0`.
pub fn canonical_function(a: f64, b: f64) -> Result<SmoothFunction> {
    SmoothFunction::from_expr(Expr::c(a * a / (2.0 * b)) * (Expr::c(2.0 * b / a) * Expr::x()).exp_m1())
}

/// The full battery for slope `a` and curvature `b`, with `f` used for
/// the comparison check.
#[allow(clippy::too_many_arguments)]
pub fn lemma_suite(
    f: &SmoothFunction,
    a: f64,
    b: f64,
    dom: &ScanDomain,
    points: usize,
    x_max: f64,
    m0: f64,
    max_iter: usize,
) -> Result<Vec<LemmaEntry>> {
    let rb = RationalBound::new(a, b)?;
    let ac = AuxCurves::new(rb);
    let mut out = vec![LemmaEntry::from_grid(verify_comparison(f, &rb, dom)?)];

    if a < -1.0 {
        let (mono, sa) = verify_a_decreasing(&ac, points)?;
        out.push(LemmaEntry::from_grid(mono));
        out.push(LemmaEntry::from_grid(sa));
        out.push(LemmaEntry::from_grid(verify_a_minus_r(&ac, points)?));
    } else {
        for name in [
            "A decreasing on (mu, x2)",
            "SA < 0 on (mu, x2)",
            "(A - R) x > 0 on (nu, x2)",
        ] {
            out.push(LemmaEntry::skipped(name, "needs f'(0) < -1"));
        }
    }

    let bm = lemma_l_box_max(400)?;
    let corner = lemma_l(-1.25, -1.0)?;
    let at_corner = bm.zeta == -1.25 && bm.s == -1.0;
    out.push(LemmaEntry::value(
        "L < 0 on [-1.5, -1.25] x [-1, 0], maximum at (-1.25, -1)",
        bm.max < 0.0 && at_corner && (corner - L_CORNER_VALUE).abs() <= 1e-6,
        bm.max,
        json!([bm.zeta, bm.s]),
    ));

    let mut worst = f64::NEG_INFINITY;
    let mut worst_zeta = f64::NAN;
    for i in 0..A_PLUS_SAMPLES {
        let zeta = ZETA_RANGE.0 + (ZETA_RANGE.1 - ZETA_RANGE.0) * i as f64 / (A_PLUS_SAMPLES - 1) as f64;
        let (_, ap) = lemma_a_pm(zeta)?;
        if ap > worst {
            worst = ap;
            worst_zeta = zeta;
        }
    }
    let (_, ap0) = lemma_a_pm(-1.5)?;
    out.push(LemmaEntry::value(
        "A+(zeta) < -1 on [-1.5, -1.25], value at -1.5",
        worst < -1.0,
        ap0,
        json!({ "zeta": worst_zeta, "A+": worst }),
    ));

    if in_slope_window(a) {
        out.push(LemmaEntry::from_grid(verify_b_gt_r(&ac, x_max, points)?));
        out.push(LemmaEntry::from_grid(verify_d_gt_r(&ac, x_max, points)?));
    } else {
        out.push(LemmaEntry::skipped("B > R on [x2, X]", "outside [-1.5,-1.25]"));
        out.push(LemmaEntry::skipped("D > R on (0, X]", "outside [-1.5,-1.25]"));
    }

    out.push(LemmaEntry::from_grid(verify_jensen(&ac, x_max, points)?));

    if (-1.5..0.0).contains(&a) {
        let cert = contraction_certificate(a, b, m0, max_iter)?;
        out.push(LemmaEntry::value(
            "contraction of the amplitude bound map",
            cert.certified,
            cert.factor,
            json!(cert.witness),
        ));
        let lin = linear_case_bounds(a, m0, -m0)?;
        let factor = if in_slope_window(a) {
            lin.factor_a
        } else {
            lin.factor_lambda
        };
        out.push(LemmaEntry::value(
            "linear-case factor at most 1",
            lin.contracts,
            factor,
            Value::Null,
        ));
    } else {
        out.push(LemmaEntry::skipped(
            "contraction of the amplitude bound map",
            "outside [-1.5, 0)",
        ));
        out.push(LemmaEntry::skipped("linear-case factor at most 1", "outside [-1.5, 0)"));
    }
    Ok(out)
}

fn verify_lemmas(cfg: &RunConfig) -> Result<i32> {
    let dom = domain(cfg)?;
    let s = &cfg.settings;
    let (f, dom, source) = if s.model.is_some() {
        let model = build_model(s)?;
        let j = model.f.jet(0.0)?;
        if j.d2 < 0.0 {
            (
                model.f.reflect(),
                dom.reflected(),
                format!("{} reflected", model.name.as_str()),
            )
        } else {
            (model.f, dom, model.name.as_str().to_string())
        }
    } else {
        let (a, b) = (s.a.unwrap_or(-1.5), s.b.unwrap_or(0.75));
        RationalBound::new(a, b)?;
        (canonical_function(a, b)?, dom, "parameters".to_string())
    };
    let j = f.jet(0.0)?;
    let (a, b) = (j.d1, 0.5 * j.d2);
    if !(b > 0.0) {
        return Err(Error::Precondition("verify-lemmas needs f''(0) != 0".into()));
    }
    let entries = lemma_suite(&f, a, b, &dom, cfg.points(), cfg.x_max(), cfg.m0(), cfg.max_iter())?;
    let all = entries.iter().all(|e| e.pass);
    for e in &entries {
        let status = if e.skipped {
            "SKIP"
        } else if e.pass {
            "PASS"
        } else {
            "FAIL"
        };
        let extra = e
            .note
            .clone()
            .or_else(|| e.value.map(|v| format!("value {v:e}")))
            .unwrap_or_default();
        println!("{status} {} {extra}", e.lemma);
    }
    write_json(
        &cfg.out_dir(),
        "lemmas.json",
        "verify-lemmas",
        json!({ "source": source, "a": a, "b": b, "pass": all, "entries": entries }),
    )?;
    Ok(if all { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_values_hit_endpoints() {
        let v = scan_values(1.3, 1.8, 0.05).unwrap();
        assert_eq!(v.len(), 11);
        assert_eq!(v[4], 1.5);
        assert_eq!(v[10], 1.8);
        assert!(scan_values(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn canonical_function_matches_bound_jet() {
        let f = canonical_function(-1.3, 0.6).unwrap();
        let j = f.jet(0.0).unwrap();
        assert!((j.d1 + 1.3).abs() < 1e-14);
        assert!((j.d2 - 1.2).abs() < 1e-14);
        assert!(j.schwarzian() < 0.0);
    }

    #[test]
    fn custom_model_binds_known_parameters() {
        let s = Settings {
            model: Some(ModelKind::Custom),
            expr: Some("p*(exp(-x)-1)".into()),
            p: Some(1.2),
            ..Settings::default()
        };
        let m = build_model(&s).unwrap();
        assert!((m.slope0 + 1.2).abs() < 1e-15);
        let s = Settings { p: None, ..s };
        assert!(build_model(&s).is_err());
    }
}
