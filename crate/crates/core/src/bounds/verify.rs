//! Grid verification of the inequalities between `f`, `r` and the auxiliary
//! curves. Every check reports the smallest slack found and, on failure, a
//! concrete witness point.

use serde::Serialize;

use super::aux::AuxCurves;
use super::rational::RationalBound;
use crate::grid::clustered;
use crate::hypotheses::ScanDomain;
use crate::jets::{deriv_tolerance, schwarzian_of, SmoothFunction};
use crate::{Error, Result};

/// Default number of grid points for the lemma checks.
pub const DEFAULT_POINTS: usize = 10_000;

/// Default right end for the checks on `[x2, X]` and `(0, X]`.
pub const DEFAULT_X_MAX: f64 = 50.0;

/// Slope window `f'(0) in [-1.5, -1.25]` in which `B > R` and `D > R`.
pub const SLOPE_WINDOW: (f64, f64) = (-1.5, -1.25);

const WINDOW_TOL: f64 = 1e-12;

pub fn in_slope_window(a: f64) -> bool {
    a >= SLOPE_WINDOW.0 - WINDOW_TOL && a <= SLOPE_WINDOW.1 + WINDOW_TOL
}

/// Outcome of one inequality sampled on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct GridCheck {
    pub name: String,
    pub pass: bool,
    pub points: usize,
    /// Smallest observed slack; positive means the inequality held there.
    pub min_slack: f64,
    pub worst_point: f64,
    /// First grid point where the inequality failed.
    pub witness: Option<f64>,
    /// `max(0, -min_slack)`.
    pub max_violation: f64,
}

impl GridCheck {
    fn scan(
        name: &str,
        points: &[f64],
        strict: bool,
        tol: f64,
        slack: impl Fn(usize, f64) -> Result<f64>,
    ) -> Result<Self> {
        let mut out = GridCheck {
            name: name.to_string(),
            pass: true,
            points: points.len(),
            min_slack: f64::INFINITY,
            worst_point: f64::NAN,
            witness: None,
            max_violation: 0.0,
        };
        for (i, &x) in points.iter().enumerate() {
            let s = slack(i, x)?;
            if s < out.min_slack || s.is_nan() {
                out.min_slack = s;
                out.worst_point = x;
            }
            let ok = if strict { s > 0.0 } else { s >= -tol };
            if !ok {
                out.pass = false;
                out.witness.get_or_insert(x);
            }
        }
        out.max_violation = (-out.min_slack).max(0.0);
        Ok(out)
    }
}

fn require_a_below_minus_one(ac: &AuxCurves) -> Result<()> {
    if ac.base.a < -1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "this check needs f'(0) < -1, got {}",
            ac.base.a
        )))
    }
}

fn require_window(ac: &AuxCurves) -> Result<()> {
    if in_slope_window(ac.base.a) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "f'(0) = {} is outside [-1.5, -1.25]",
            ac.base.a
        )))
    }
}

/// `r < f` on `(0, hi]` and `r > f` on `(max(lo, mu), 0)`.
///
/// `rb` should be the bound matching the 2-jet of `f` at 0; equality of
/// `f` and `r` counts as a failure since the comparison is strict.
pub fn verify_comparison(f: &SmoothFunction, rb: &RationalBound, dom: &ScanDomain) -> Result<GridCheck> {
    let j = f.jet(0.0)?;
    if !(j.d2 > 0.0) {
        return Err(Error::Precondition(format!(
            "comparison with r needs f''(0) > 0, got {}",
            j.d2
        )));
    }
    let half = dom.n / 2;
    let left = dom.lo.max(rb.mu());
    let mut pts = clustered(left, 0.0, half);
    pts.extend(clustered(0.0, dom.hi, dom.n - half));
    pts.push(dom.hi);
    GridCheck::scan("comparison r vs f", &pts, true, 0.0, |_, x| {
        let diff = f.eval(x)? - rb.eval(x)?;
        Ok(if x > 0.0 { diff } else { -diff })
    })
}

/// `A` strictly decreasing on `(mu, x2)` and `SA < 0` there away from 0.
///
/// Monotonicity compares consecutive grid values. The Schwarzian is taken
/// from jets of the closed form, skipping `|x| < 1e-3 (x2 - mu)` where the
/// closed form cancels.
pub fn verify_a_decreasing(ac: &AuxCurves, n: usize) -> Result<(GridCheck, GridCheck)> {
    require_a_below_minus_one(ac)?;
    let (mu, x2) = (ac.base.mu(), ac.base.x2());
    let pts = clustered(mu, x2, n);
    let values: Vec<f64> = pts.iter().map(|&x| ac.curve_a(x)).collect::<Result<_>>()?;
    let mono = GridCheck::scan("A decreasing on (mu, x2)", &pts[..pts.len() - 1], true, 0.0, |i, _| {
        Ok(values[i] - values[i + 1])
    })?;

    let a_fn = ac.a_function();
    let skip = 1e-3 * (x2 - mu);
    let away: Vec<f64> = pts.iter().copied().filter(|x| x.abs() >= skip).collect();
    let sa = GridCheck::scan("SA < 0 on (mu, x2)", &away, true, 0.0, |_, x| {
        let j = a_fn.jet(x)?;
        Ok(-schwarzian_of(&j, x, deriv_tolerance(1.0))?)
    })?;
    Ok((mono, sa))
}

/// `(A(x) - R(x)) x > 0` on `(nu, x2)`, `x != 0`.
pub fn verify_a_minus_r(ac: &AuxCurves, n: usize) -> Result<GridCheck> {
    require_a_below_minus_one(ac)?;
    let nu = ac.nu.expect("a < -1");
    let x2 = ac.base.x2();
    let half = n / 2;
    let mut pts = clustered(nu, 0.0, half);
    pts.extend(clustered(0.0, x2, n - half));
    GridCheck::scan("(A - R) x > 0 on (nu, x2)", &pts, true, 0.0, |_, x| {
        Ok(ac.a_minus_r(x)? * x.signum())
    })
}

/// `B(x) > R(x)` on `[x2, x_max]`.
pub fn verify_b_gt_r(ac: &AuxCurves, x_max: f64, n: usize) -> Result<GridCheck> {
    require_window(ac)?;
    let x2 = ac.base.x2();
    if !(x_max > x2) {
        return Err(Error::Precondition(format!("x_max = {x_max} must exceed x2 = {x2}")));
    }
    let mut pts = vec![x2];
    pts.extend(clustered(x2, x_max, n.saturating_sub(2).max(4)));
    pts.push(x_max);
    GridCheck::scan("B > R on [x2, X]", &pts, true, 0.0, |_, x| {
        Ok(ac.curve_b(x)? - ac.curve_r(x)?)
    })
}

/// `D(x) > R(x)` on `(0, x_max]`.
pub fn verify_d_gt_r(ac: &AuxCurves, x_max: f64, n: usize) -> Result<GridCheck> {
    require_window(ac)?;
    if !(x_max > 0.0) {
        return Err(Error::Precondition(format!("x_max = {x_max} must be positive")));
    }
    let x2 = ac.base.x2();
    let mut pts = clustered(0.0, x_max, n.saturating_sub(1).max(4));
    pts.push(x_max);
    GridCheck::scan("D > R on (0, X]", &pts, true, 0.0, |_, x| {
        if x < x2 {
            ac.a_minus_r(x)
        } else {
            Ok(ac.curve_d(x)? - ac.curve_r(x)?)
        }
    })
}

/// `B(M) >= r(-r(M)/2)` for `M in (0, x_max]`, allowing roundoff.
pub fn verify_jensen(ac: &AuxCurves, x_max: f64, n: usize) -> Result<GridCheck> {
    if !(x_max > 0.0) {
        return Err(Error::Precondition(format!("x_max = {x_max} must be positive")));
    }
    let mut pts = clustered(0.0, x_max, n.saturating_sub(1).max(4));
    pts.push(x_max);
    let r = &ac.base;
    GridCheck::scan("B(M) >= r(-r(M)/2)", &pts, false, 1e-14, |_, m| {
        let half = -0.5 * r.eval(m)?;
        Ok(ac.curve_b(m)? - r.eval(half)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Expr;

    fn wright(p: f64) -> SmoothFunction {
        SmoothFunction::from_expr(Expr::c(p) * (-Expr::x()).exp_m1()).unwrap()
    }

    #[test]
    fn comparison_holds_for_wright() {
        for p in [1.0, 1.5] {
            let f = wright(p);
            let rb = RationalBound::from_jet(&f.jet(0.0).unwrap()).unwrap();
            let dom = ScanDomain::new(-1.99, 10.0, 100_000).unwrap();
            let c = verify_comparison(&f, &rb, &dom).unwrap();
            assert!(c.pass, "p={p}: {c:?}");
        }
    }

    #[test]
    fn comparison_of_r_with_itself_is_not_strict() {
        let rb = RationalBound::new(-1.0, 0.5).unwrap();
        let dom = ScanDomain::new(-1.9, 10.0, 1000).unwrap();
        let c = verify_comparison(&rb.to_function(), &rb, &dom).unwrap();
        assert!(!c.pass);
        assert!(c.witness.is_some());
        assert_eq!(c.max_violation, 0.0);
    }

    #[test]
    fn comparison_rejects_concave_at_zero() {
        let f = SmoothFunction::from_expr(Expr::c(-1.2) * Expr::x().tanh()).unwrap();
        let rb = RationalBound::new(-1.2, 1.0).unwrap();
        let dom = ScanDomain::default();
        assert!(matches!(verify_comparison(&f, &rb, &dom), Err(Error::Precondition(_))));
    }

    #[test]
    fn window_checks_pass_inside() {
        for (a, b) in [(-1.5, 0.75), (-1.25, 1.0)] {
            let ac = AuxCurves::from_params(a, b).unwrap();
            let c = verify_b_gt_r(&ac, 50.0, 10_000).unwrap();
            assert!(c.pass, "{c:?}");
            let c = verify_d_gt_r(&ac, 50.0, 10_000).unwrap();
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn window_checks_reject_outside() {
        let ac = AuxCurves::from_params(-1.0, 1.0).unwrap();
        assert!(matches!(verify_d_gt_r(&ac, 50.0, 100), Err(Error::Precondition(_))));
        assert!(matches!(verify_b_gt_r(&ac, 50.0, 100), Err(Error::Precondition(_))));
    }

    #[test]
    fn a_checks() {
        let ac = AuxCurves::from_params(-1.4, 0.5).unwrap();
        let (mono, sa) = verify_a_decreasing(&ac, 10_000).unwrap();
        assert!(mono.pass && sa.pass, "{mono:?} {sa:?}");
        assert!(verify_a_minus_r(&ac, 10_000).unwrap().pass);
    }

    #[test]
    fn jensen_chain() {
        for a in [-0.5, -1.0, -1.5] {
            let ac = AuxCurves::from_params(a, 1.0).unwrap();
            assert!(verify_jensen(&ac, 50.0, 10_000).unwrap().pass);
        }
    }
}
