//! Method of steps for `x'(t) = f(x(t-1))`.
//!
//! With `h = 1/N` the step grid is aligned to the integers, so on each step
//! the right-hand side `g(t) = f(x(t-1))` is already known from the previous
//! unit interval. Classical RK4 on `x' = g(t)` reduces to Simpson's rule,
//! `x_{i+1} = x_i + h/6 (g(t_i) + 4 g(t_i + h/2) + g(t_{i+1}))`, with the
//! midpoint value of `x(t - 1)` taken from the cubic Hermite dense output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::AuxCurves;
use crate::bounds::{in_slope_window, RationalBound};
use crate::jets::SmoothFunction;
use crate::{Error, Result};

pub const DEFAULT_STEPS_PER_UNIT: usize = 256;
pub const MIN_STEPS_PER_UNIT: usize = 16;
pub const OVERFLOW: f64 = 1e12;
/// Absolute tolerance for extremum times.
pub const EXTREMUM_TOL: f64 = 1e-11;
const BISECTION_ITERS: usize = 50;
/// `M - m` below this counts as convergence to the equilibrium.
pub const CONVERGED_SPREAD: f64 = 1e-4;

/// Initial data on `[-1, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum History {
    Constant(f64),
    /// Values on a uniform grid of `[-1, 0]`, endpoints included,
    /// interpolated by local cubics.
    Sampled(Vec<f64>),
}

impl History {
    pub fn sampled(values: Vec<f64>) -> Result<Self> {
        if values.len() < 4 || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition(
                "sampled history needs at least 4 finite values".into(),
            ));
        }
        Ok(History::Sampled(values))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            History::Constant(z) => *z,
            History::Sampled(v) => {
                let n = v.len() - 1;
                let s = ((t + 1.0) * n as f64).clamp(0.0, n as f64);
                let base = (s.floor() as usize).saturating_sub(1).min(n - 3);
                let nodes = [base, base + 1, base + 2, base + 3];
                let mut out = 0.0;
                for &j in &nodes {
                    let mut w = 1.0;
                    for &k in &nodes {
                        if k != j {
                            w *= (s - k as f64) / (j as f64 - k as f64);
                        }
                    }
                    out += w * v[j];
                }
                out
            }
        }
    }
}

/// Dense solution on `[-1, T]`.
#[derive(Debug, Clone)]
pub struct Solution {
    f: SmoothFunction,
    history: History,
    steps_per_unit: usize,
    /// `x(i h)` for `i = 0..=steps`.
    x: Vec<f64>,
    /// `x'(i h) = f(x(i h - 1))`.
    d: Vec<f64>,
}

impl Solution {
    pub fn steps_per_unit(&self) -> usize {
        self.steps_per_unit
    }

    pub fn step(&self) -> f64 {
        1.0 / self.steps_per_unit as f64
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.x.len() - 1)
    }

    pub fn function(&self) -> &SmoothFunction {
        &self.f
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    /// Time of node `i`.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 / self.steps_per_unit as f64
    }

    /// Node values `x(i h)`, `i >= 0`.
    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// Node derivatives `x'(i h)`, `i >= 0`.
    pub fn node_derivatives(&self) -> &[f64] {
        &self.d
    }

    /// `x(t)` for `t in [-1, T]`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.history.eval(t.max(-1.0));
        }
        let n = self.steps_per_unit as f64;
        let last = self.x.len() - 1;
        let i = ((t * n).floor() as usize).min(last - 1);
        let h = self.step();
        let s = (t - self.time(i)) / h;
        hermite(self.x[i], self.x[i + 1], self.d[i], self.d[i + 1], h, s)
    }

    /// `x'(t) = f(x(t - 1))` for `t in (0, T]`.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.f.eval(self.eval(t - 1.0))
    }
}

fn hermite(x0: f64, x1: f64, d0: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * x0 + h10 * h * d0 + h01 * x1 + h11 * h * d1
}

fn hermite_mid(x0: f64, x1: f64, d0: f64, d1: f64, h: f64) -> f64 {
    0.5 * (x0 + x1) + 0.125 * h * (d0 - d1)
}

/// Integrates from `history` up to `t_end`, rounded up to the step grid.
pub fn integrate(f: &SmoothFunction, history: &History, t_end: f64, steps_per_unit: usize) -> Result<Solution> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Precondition(format!("T must be positive, got {t_end}")));
    }
    if steps_per_unit < MIN_STEPS_PER_UNIT {
        return Err(Error::Precondition(format!(
            "steps per unit must be at least {MIN_STEPS_PER_UNIT}, got {steps_per_unit}"
        )));
    }
    let n = steps_per_unit;
    let h = 1.0 / n as f64;
    let steps = (t_end * n as f64 - 1e-9).ceil().max(1.0) as usize;
    let mut x = Vec::with_capacity(steps + 1);
    let mut d = Vec::with_capacity(steps + 1);
    x.push(history.eval(0.0));
    d.push(f.eval(history.eval(-1.0))?);
    for i in 0..steps {
        let (k2, k4) = if i < n {
            let t = i as f64 * h - 1.0;
            let mid = history.eval(t + 0.5 * h);
            let end = if i + 1 == n {
                x[0]
            } else {
                history.eval((i + 1) as f64 * h - 1.0)
            };
            (f.eval(mid)?, f.eval(end)?)
        } else {
            let j = i - n;
            let mid = hermite_mid(x[j], x[j + 1], d[j], d[j + 1], h);
            (f.eval(mid)?, f.eval(x[j + 1])?)
        };
        let next = x[i] + h / 6.0 * (d[i] + 4.0 * k2 + k4);
        if !(next.abs() <= OVERFLOW) {
            return Err(Error::Overflow {
                t: (i + 1) as f64 * h,
                x: next.abs(),
            });
        }
        x.push(next);
        d.push(k4);
    }
    Ok(Solution {
        f: f.clone(),
        history: history.clone(),
        steps_per_unit: n,
        x,
        d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Min,
    Max,
}

impl ExtremumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtremumKind::Min => "min",
            ExtremumKind::Max => "max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremumRecord {
    /// 1 for the first extremum after `t = 0`.
    pub index: usize,
    pub t: f64,
    pub x: f64,
    pub kind: ExtremumKind,
}

/// Strict local extrema with `t` in `(t_from, t_to]`, in time order.
///
/// Sign changes of the node derivatives are refined by bisection on
/// `f(x(t - 1))`; tangential zeros without a sign change are skipped.
pub fn extrema_between(sol: &Solution, t_from: f64, t_to: f64) -> Result<Vec<ExtremumRecord>> {
    let d = sol.node_derivatives();
    let n = sol.steps_per_unit() as f64;
    let first = ((t_from.max(0.0) * n).floor() as usize).min(d.len() - 1);
    let last = ((t_to * n).ceil() as usize).min(d.len() - 1);
    let mut out = Vec::new();
    let mut prev: Option<usize> = None;
    for i in first..=last {
        if d[i] == 0.0 {
            continue;
        }
        if let Some(p) = prev {
            if (d[p] > 0.0) != (d[i] > 0.0) {
                let kind = if d[p] > 0.0 {
                    ExtremumKind::Max
                } else {
                    ExtremumKind::Min
                };
                let t = refine(sol, sol.time(p), sol.time(i), d[p] > 0.0)?;
                if t > t_from && t <= t_to && t > 0.0 {
                    out.push(ExtremumRecord {
                        index: out.len() + 1,
                        t,
                        x: sol.eval(t),
                        kind,
                    });
                }
            }
        }
        prev = Some(i);
    }
    Ok(out)
}

fn refine(sol: &Solution, mut lo: f64, mut hi: f64, lo_positive: bool) -> Result<f64> {
    for _ in 0..BISECTION_ITERS {
        if hi - lo <= EXTREMUM_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g = sol.derivative(mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if (g > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The first `up_to` extrema after `t = 0`.
///
/// Fails with [`Error::NoExtremum`] when `x` has no extremum on `(0, T]`;
/// otherwise returns as many as were found, up to `up_to`.
pub fn find_extrema(sol: &Solution, up_to: usize) -> Result<Vec<ExtremumRecord>> {
    if up_to == 0 {
        return Err(Error::Precondition("up_to must be at least 1".into()));
    }
    let mut all = extrema_between(sol, 0.0, sol.t_end())?;
    if all.is_empty() {
        return Err(Error::NoExtremum {
            found: 0,
            wanted: up_to,
            horizon: sol.t_end(),
        });
    }
    all.truncate(up_to);
    Ok(all)
}

/// `F_k(z)`: the value of the `k`-th extremum of the solution from the
/// constant history `z`. `F_k(0) = 0`.
pub fn return_map_fk(f: &SmoothFunction, z: f64, k: usize, t_end: f64, steps_per_unit: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let sol = integrate(f, &History::Constant(z), t_end, steps_per_unit)?;
    let ext = find_extrema(&sol, k).map_err(|e| match e {
        Error::NoExtremum { horizon, .. } => Error::NoExtremum {
            found: 0,
            wanted: k,
            horizon,
        },
        other => other,
    })?;
    if ext.len() < k {
        return Err(Error::NoExtremum {
            found: ext.len(),
            wanted: k,
            horizon: sol.t_end(),
        });
    }
    Ok(ext[k - 1].x)
}

/// Empirical surrogate for the bounds of the omega-limit set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeEstimate {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    #[serde(rename = "windowStart")]
    pub window_start: f64,
    #[serde(rename = "windowEnd")]
    pub window_end: f64,
}

impl AmplitudeEstimate {
    pub fn spread(&self) -> f64 {
        self.big_m - self.m
    }

    pub fn converged(&self) -> bool {
        self.spread() < CONVERGED_SPREAD
    }
}

/// Min and max of `x` over `[transient, transient + window]` of an existing
/// solution.
pub fn amplitude_of(sol: &Solution, transient: f64, window: f64) -> Result<AmplitudeEstimate> {
    if !(transient >= 0.0 && window > 0.0) {
        return Err(Error::Precondition(format!(
            "need transient >= 0 and window > 0, got {transient}, {window}"
        )));
    }
    let end = transient + window;
    if end > sol.t_end() + 1e-9 {
        return Err(Error::Precondition(format!(
            "window ends at {end} beyond T = {}",
            sol.t_end()
        )));
    }
    let mut lo = sol.eval(transient).min(sol.eval(end));
    let mut hi = sol.eval(transient).max(sol.eval(end));
    let n = sol.steps_per_unit() as f64;
    let first = (transient * n).ceil() as usize;
    let last = ((end * n).floor() as usize).min(sol.nodes().len() - 1);
    for &v in &sol.nodes()[first.min(last)..=last] {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for e in extrema_between(sol, transient, end)? {
        lo = lo.min(e.x);
        hi = hi.max(e.x);
    }
    Ok(AmplitudeEstimate {
        m: lo,
        big_m: hi,
        window_start: transient,
        window_end: end,
    })
}

/// Integrates to `transient + window` and measures the amplitude there.
pub fn omega_amplitude(
    f: &SmoothFunction,
    history: &History,
    transient: f64,
    window: f64,
    steps_per_unit: usize,
) -> Result<AmplitudeEstimate> {
    if !(transient > 0.0 && window > 0.0) {
        return Err(Error::Precondition(format!(
            "need transient > 0 and window > 0, got {transient}, {window}"
        )));
    }
    let sol = integrate(f, history, transient + window, steps_per_unit)?;
    amplitude_of(&sol, transient, window)
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityEntry {
    pub name: String,
    pub applicable: bool,
    pub holds: Option<bool>,
    /// Positive when the inequality holds.
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub a: f64,
    pub b: f64,
    pub estimate: AmplitudeEstimate,
    pub entries: Vec<InequalityEntry>,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds != Some(false))
    }

    pub fn entry(&self, name: &str) -> Option<&InequalityEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

pub const M_GT_D: &str = "m > D(M)";
pub const M_GT_R_HALF: &str = "m > r(-r(M)/2)";
pub const BIG_M_LT_R: &str = "M < r(m)";
pub const BIG_M_LT_UPPER_R: &str = "M < R(m)";

/// Checks the amplitude inequalities against an empirical `(m, M)`.
pub fn verify_mm_inequalities(f: &SmoothFunction, est: &AmplitudeEstimate) -> Result<InequalityReport> {
    let j = f.jet(0.0)?;
    if !(j.d2 > 0.0) {
        return Err(Error::Precondition(format!(
            "needs f''(0) > 0, got {}; reflect f first",
            j.d2
        )));
    }
    if !(est.m < 0.0 && est.big_m > 0.0) {
        return Err(Error::Precondition(format!(
            "needs m < 0 < M, got m = {}, M = {}",
            est.m, est.big_m
        )));
    }
    let rb = RationalBound::from_jet(&j)?;
    let ac = AuxCurves::new(rb);
    let (m, big_m) = (est.m, est.big_m);
    let mut entries = Vec::new();
    let mut push = |name: &str, slack: Option<Result<f64>>| {
        let slack = slack.map(|s| s.unwrap_or(f64::NAN));
        entries.push(InequalityEntry {
            name: name.to_string(),
            applicable: slack.is_some(),
            holds: slack.map(|s| s > 0.0),
            slack,
        });
    };
    push(M_GT_D, Some(ac.curve_d(big_m).map(|d| m - d)));
    push(
        M_GT_R_HALF,
        Some(rb.eval(big_m).and_then(|r| rb.eval(-0.5 * r)).map(|v| m - v)),
    );
    let a = rb.a;
    // outside the domain of r the bound is vacuous (+inf)
    let r_of_m = || {
        if m > rb.mu() {
            rb.eval(m).map(|v| v - big_m)
        } else {
            Ok(f64::INFINITY)
        }
    };
    push(BIG_M_LT_R, (-1.5..0.0).contains(&a).then(r_of_m));
    push(
        BIG_M_LT_UPPER_R,
        in_slope_window(a).then(|| match ac.nu {
            Some(nu) if m > nu => ac.curve_r(m).map(|v| v - big_m),
            _ => Ok(f64::INFINITY),
        }),
    );
    Ok(InequalityReport {
        a,
        b: rb.b,
        estimate: *est,
        entries,
    })
}

/// `count` constant histories drawn uniformly from `[lo, hi)`.
pub fn seeded_constant_histories(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(lo..hi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Expr;

    fn linear() -> SmoothFunction {
        SmoothFunction::from_expr(-Expr::x()).unwrap()
    }

    fn wright(p: f64) -> SmoothFunction {
        SmoothFunction::from_expr(Expr::c(p) * (-Expr::x()).exp_m1()).unwrap()
    }

    #[test]
    fn linear_hand_values() {
        let sol = integrate(&linear(), &History::Constant(1.0), 2.0, 256).unwrap();
        assert!(sol.eval(1.0).abs() < 1e-10);
        assert!((sol.eval(2.0) + 0.5).abs() < 1e-10);
        // x = t^2/2 - 2t + 3/2 on [1, 2]
        let t = 1.37;
        assert!((sol.eval(t) - (t * t / 2.0 - 2.0 * t + 1.5)).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_stays_put() {
        let sol = integrate(&wright(1.3), &History::Constant(0.0), 20.0, 64).unwrap();
        assert!(sol.nodes().iter().all(|&v| v == 0.0));
        assert!(matches!(find_extrema(&sol, 1), Err(Error::NoExtremum { .. })));
    }

    #[test]
    fn first_extremum_of_linear() {
        let sol = integrate(&linear(), &History::Constant(1.0), 5.0, 256).unwrap();
        let e = find_extrema(&sol, 1).unwrap();
        assert!((e[0].t - 2.0).abs() < 1e-9);
        assert!((e[0].x + 0.5).abs() < 1e-9);
        assert_eq!(e[0].kind, ExtremumKind::Min);
        assert!((return_map_fk(&linear(), 1.0, 1, 5.0, 256).unwrap() + 0.5).abs() < 1e-9);
        assert_eq!(return_map_fk(&linear(), 0.0, 3, 5.0, 256).unwrap(), 0.0);
    }

    #[test]
    fn sampled_history_reproduces_cubics() {
        let c = |t: f64| 0.3 - t + 2.0 * t * t + t * t * t;
        let vals: Vec<f64> = (0..=10).map(|i| c(-1.0 + i as f64 / 10.0)).collect();
        let h = History::sampled(vals).unwrap();
        for t in [-1.0, -0.95, -0.5, -0.01, 0.0] {
            assert!((h.eval(t) - c(t)).abs() < 1e-13);
        }
        assert!(History::sampled(vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let f = SmoothFunction::from_expr(Expr::c(3.0) * Expr::x()).unwrap();
        let r = integrate(&f, &History::Constant(1.0), 100.0, 16);
        assert!(matches!(r, Err(Error::Overflow { .. })));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(integrate(&linear(), &History::Constant(1.0), 0.0, 256).is_err());
        assert!(integrate(&linear(), &History::Constant(1.0), 1.0, 8).is_err());
    }

    #[test]
    fn mm_preconditions() {
        let est = AmplitudeEstimate {
            m: 0.1,
            big_m: 0.5,
            window_start: 0.0,
            window_end: 1.0,
        };
        assert!(matches!(
            verify_mm_inequalities(&wright(1.65), &est),
            Err(Error::Precondition(_))
        ));
        let est = AmplitudeEstimate { m: -0.1, ..est };
        assert!(matches!(
            verify_mm_inequalities(&wright(1.65).reflect(), &est),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn seeded_histories_are_reproducible() {
        let a = seeded_constant_histories(42, 20, -0.9, 3.0);
        assert_eq!(a, seeded_constant_histories(42, 20, -0.9, 3.0));
        assert!(a.iter().all(|&z| (-0.9..3.0).contains(&z)));
    }
}
