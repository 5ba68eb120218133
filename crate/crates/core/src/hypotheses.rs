//! Grid evidence for the standing hypotheses on `f`:
//!
//! - (H1) `x f(x) < 0` for `x != 0` and `f'(0) < 0`,
//! - (H2) `f` is bounded below and has at most one critical point,
//! - (H3) `Sf < 0` away from the critical point,
//!
//! together with the shape class of `f`. All conclusions hold only on the
//! sampled window.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{GridCheck, RationalBound};
use crate::grid::uniform;
use crate::jets::{deriv_tolerance, Jet3, SmoothFunction};
use crate::{Error, Result};

/// Root tolerance for critical points and inflexions.
pub const ROOT_TOL: f64 = 1e-10;

/// `f` counts as unbounded below if its grid minimum falls under this.
pub const BOUNDED_BELOW_FLOOR: f64 = -1e8;

/// Finite window `[lo, hi]` with `n` grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanDomain {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl ScanDomain {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < 0.0 && hi > 0.0) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Precondition(format!(
                "scan window needs lo < 0 < hi, got [{lo}, {hi}]"
            )));
        }
        if n < 100 {
            return Err(Error::Precondition(format!(
                "scan window needs at least 100 points, got {n}"
            )));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn points(&self) -> Vec<f64> {
        uniform(self.lo, self.hi, self.n)
    }

    /// The window seen by `-f(-x)`.
    pub fn reflected(&self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
            n: self.n,
        }
    }
}

impl Default for ScanDomain {
    fn default() -> Self {
        Self {
            lo: -10.0,
            hi: 10.0,
            n: 2000,
        }
    }
}

/// The eight admissible shapes, keyed by the sign of `f''(0)`, the
/// position of the critical point and the presence of a negative
/// inflexion point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl Shape {
    pub fn letter(self) -> char {
        match self {
            Shape::A => 'a',
            Shape::B => 'b',
            Shape::C => 'c',
            Shape::D => 'd',
            Shape::E => 'e',
            Shape::F => 'f',
            Shape::G => 'g',
            Shape::H => 'h',
        }
    }

    /// Shape of `-f(-x)` when `f` has shape `self` and `f''(0) < 0`.
    pub fn reflected(self) -> Option<Shape> {
        match self {
            Shape::F => Some(Shape::B),
            Shape::G => Some(Shape::C),
            Shape::H => Some(Shape::E),
            _ => None,
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub pass: bool,
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundedBelowCheck {
    pub pass: bool,
    pub critical_point: Option<f64>,
    pub min_value: f64,
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub domain: ScanDomain,
    pub h1: Check,
    pub h2: BoundedBelowCheck,
    pub h3: Check,
    /// `None` when `f''(0)` vanishes to tolerance.
    pub shape: Option<Shape>,
    pub f1_0: f64,
    pub f2_0: f64,
    pub inflexions: Vec<f64>,
    pub evidence: String,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.h1.pass && self.h2.pass && self.h3.pass
    }
}

fn bisect(g: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut g_lo = g(lo)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Brackets `[x_i, x_j]` around sign changes of `vals`, ignoring entries
/// flagged as zero.
fn sign_change_brackets(xs: &[f64], vals: &[f64], zero: impl Fn(f64) -> bool) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut last: Option<(f64, bool)> = None;
    for (&x, &v) in xs.iter().zip(vals) {
        if zero(v) {
            continue;
        }
        let pos = v > 0.0;
        if let Some((lx, lpos)) = last {
            if lpos != pos {
                out.push((lx, x));
            }
        }
        last = Some((x, pos));
    }
    out
}

pub fn check_hypotheses(f: &SmoothFunction, dom: &ScanDomain) -> Result<HypothesisReport> {
    let xs = dom.points();
    let jets: Vec<Jet3> = xs.par_iter().map(|&x| f.jet(x)).collect::<Result<_>>()?;
    let j0 = f.jet(0.0)?;
    let tau = deriv_tolerance(j0.d1);

    // H1
    let mut h1 = Check {
        pass: true,
        witness: None,
        detail: String::new(),
    };
    if !(j0.d1 < -tau) {
        h1.pass = false;
        h1.witness = Some(0.0);
        h1.detail = format!("f'(0) = {} is not negative", j0.d1);
    } else if let Some((&x, _)) = xs.iter().zip(&jets).find(|(&x, j)| x != 0.0 && !(x * j.v < 0.0)) {
        h1.pass = false;
        h1.witness = Some(x);
        h1.detail = format!("x f(x) >= 0 at x = {x}");
    }

    // H2: inconclusive on interior plateaus of f'
    let flat: Vec<bool> = jets.iter().map(|j| j.d1.abs() <= tau).collect();
    let mut i = 0;
    while i < flat.len() {
        if flat[i] {
            let start = i;
            while i < flat.len() && flat[i] {
                i += 1;
            }
            if start > 0 && i < flat.len() && i - start >= 3 {
                return Err(Error::Inconclusive(format!(
                    "f' vanishes on [{}, {}]",
                    xs[start],
                    xs[i - 1]
                )));
            }
        } else {
            i += 1;
        }
    }
    let d1: Vec<f64> = jets.iter().map(|j| j.d1).collect();
    let crit = sign_change_brackets(&xs, &d1, |v| v.abs() <= tau);
    let fprime = |x: f64| f.jet(x).map(|j| j.d1);
    let (min_idx, min_value) = jets
        .iter()
        .enumerate()
        .map(|(i, j)| (i, j.v))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let mut h2 = BoundedBelowCheck {
        pass: true,
        critical_point: None,
        min_value,
        witness: None,
        detail: String::new(),
    };
    if let Some(&(lo, hi)) = crit.first() {
        h2.critical_point = Some(bisect(fprime, lo, hi, ROOT_TOL)?);
    }
    if crit.len() > 1 {
        let (lo, hi) = crit[1];
        h2.pass = false;
        h2.witness = Some(bisect(fprime, lo, hi, ROOT_TOL)?);
        h2.detail = format!("{} sign changes of f'", crit.len());
    } else if !(min_value > BOUNDED_BELOW_FLOOR) {
        h2.pass = false;
        h2.witness = Some(xs[min_idx]);
        h2.detail = format!("min f = {min_value:e} is below the floor {BOUNDED_BELOW_FLOOR:e}");
    }

    // H3
    let mut h3 = Check {
        pass: true,
        witness: None,
        detail: String::new(),
    };
    for (&x, j) in xs.iter().zip(&jets) {
        if j.d1.abs() <= tau {
            continue;
        }
        let s = j.schwarzian();
        if !(s < 0.0) {
            h3.pass = false;
            h3.witness = Some(x);
            h3.detail = format!("Sf({x}) = {s}");
            break;
        }
    }

    // inflexions
    let d2: Vec<f64> = jets.iter().map(|j| j.d2).collect();
    let inflexions = sign_change_brackets(&xs, &d2, |v| v == 0.0)
        .into_iter()
        .map(|(lo, hi)| bisect(|x| f.jet(x).map(|j| j.d2), lo, hi, ROOT_TOL))
        .collect::<Result<Vec<_>>>()?;

    let tau2 = deriv_tolerance(j0.d1);
    let negative_inflexion = inflexions.iter().any(|&x| x < 0.0);
    let shape = if j0.d2 > tau2 {
        Some(match h2.critical_point {
            None if negative_inflexion => Shape::B,
            None => Shape::A,
            Some(c) if c < 0.0 => Shape::C,
            Some(_) if negative_inflexion => Shape::E,
            Some(_) => Shape::D,
        })
    } else if j0.d2 < -tau2 {
        Some(match h2.critical_point {
            None => Shape::F,
            Some(c) if c > 0.0 => Shape::G,
            Some(_) => Shape::H,
        })
    } else {
        None
    };

    Ok(HypothesisReport {
        domain: *dom,
        h1,
        h2,
        h3,
        shape,
        f1_0: j0.d1,
        f2_0: j0.d2,
        inflexions,
        evidence: format!("evidence on [{}, {}] with {} points", dom.lo, dom.hi, dom.n),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundednessReport {
    pub pass: bool,
    /// `sup f` over the grid part of `[lo, 0)`.
    pub sup_estimate: f64,
    /// `2 f'(0)^2 / |f''(0)|`, the upper bound for `f` on `x < 0`.
    pub bound: f64,
    /// `-f(-x) > r(x, f'(0), -f''(0)/2)` for `x in (0, -lo]`.
    pub comparison: GridCheck,
}

/// Evidence that `f` is bounded above when `f''(0) < 0`.
///
/// With `g(x) = -f(-x)` the comparison `g > r` on `x > 0` gives
/// `f(y) < 2 f'(0)^2 / |f''(0)|` for `y < 0`; the bound below comes from (H2).
pub fn verify_boundedness_corollary(f: &SmoothFunction, dom: &ScanDomain) -> Result<BoundednessReport> {
    let j0 = f.jet(0.0)?;
    if !(j0.d2 < 0.0) {
        return Err(Error::Precondition(format!("needs f''(0) < 0, got {}", j0.d2)));
    }
    let report = check_hypotheses(f, dom)?;
    if !report.all_pass() {
        return Err(Error::Precondition(
            "f does not satisfy the hypotheses on the window".into(),
        ));
    }
    let rb = RationalBound::new(j0.d1, -0.5 * j0.d2)?;
    let bound = rb.limit().abs();
    let g = f.reflect();
    let ts = crate::grid::clustered(0.0, -dom.lo, dom.n);
    let mut comparison = GridCheck {
        name: "-f(-x) > r(x) on (0, -lo]".into(),
        pass: true,
        points: ts.len(),
        min_slack: f64::INFINITY,
        worst_point: f64::NAN,
        witness: None,
        max_violation: 0.0,
    };
    let mut sup = f64::NEG_INFINITY;
    for &t in &ts {
        let gt = g.eval(t)?;
        sup = sup.max(-gt);
        let slack = gt - rb.eval(t)?;
        if slack < comparison.min_slack {
            comparison.min_slack = slack;
            comparison.worst_point = t;
        }
        if !(slack > 0.0) {
            comparison.pass = false;
            comparison.witness.get_or_insert(t);
        }
    }
    comparison.max_violation = (-comparison.min_slack).max(0.0);
    Ok(BoundednessReport {
        pass: comparison.pass && sup < bound,
        sup_estimate: sup,
        bound,
        comparison,
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
    fn scan_domain_validation() {
        assert!(ScanDomain::new(1.0, 2.0, 200).is_err());
        assert!(ScanDomain::new(-1.0, 2.0, 99).is_err());
        assert_eq!(ScanDomain::default(), ScanDomain::new(-10.0, 10.0, 2000).unwrap());
    }

    #[test]
    fn wright_passes_with_shape_a() {
        let r = check_hypotheses(&wright(1.0), &ScanDomain::new(-5.0, 5.0, 1000).unwrap()).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.shape, Some(Shape::A));
        assert_eq!(r.f1_0, -1.0);
        assert_eq!(r.f2_0, 1.0);
        assert!(r.h2.critical_point.is_none());
        assert!(r.inflexions.is_empty());
    }

    #[test]
    fn linear_fails_h3_with_witness() {
        let f = SmoothFunction::from_expr(-Expr::x()).unwrap();
        let r = check_hypotheses(&f, &ScanDomain::default()).unwrap();
        assert!(r.h1.pass && r.h2.pass);
        assert!(!r.h3.pass);
        assert!(r.h3.witness.is_some());
        assert_eq!(r.shape, None);
    }

    #[test]
    fn h1_failure_has_witness() {
        let f = SmoothFunction::from_expr(Expr::x()).unwrap();
        let r = check_hypotheses(&f, &ScanDomain::default()).unwrap();
        assert!(!r.h1.pass);
        assert_eq!(r.h1.witness, Some(0.0));
    }

    #[test]
    fn plateau_is_inconclusive() {
        // |f'| stays below 1e-12 on roughly [-4, 4] and grows beyond it
        let x = Expr::x();
        let f = SmoothFunction::from_expr(Expr::c(-1e-20) * (x.clone() + x.clone() * x.powf(2.0).exp())).unwrap();
        let r = check_hypotheses(&f, &ScanDomain::default());
        assert!(matches!(r, Err(Error::Inconclusive(_))), "{r:?}");
    }

    #[test]
    fn two_critical_points_fail_h2() {
        // f' = -1 + 1.5 x^2 changes sign at +-sqrt(2/3)
        let f = SmoothFunction::from_expr(-Expr::x() + Expr::c(0.5) * Expr::x().powf(3.0)).unwrap();
        let r = check_hypotheses(&f, &ScanDomain::default()).unwrap();
        assert!(!r.h2.pass);
        assert!(r.h2.witness.is_some());
    }

    #[test]
    fn reflected_wright_is_shape_f_and_maps_back() {
        let g = wright(1.0).reflect();
        let r = check_hypotheses(&g, &ScanDomain::default()).unwrap();
        assert_eq!(r.shape, Some(Shape::F));
        assert_eq!(Shape::F.reflected(), Some(Shape::B));
    }

    #[test]
    fn boundedness_precondition() {
        let f = SmoothFunction::from_expr(Expr::c(-1.2) * Expr::x().tanh()).unwrap();
        assert!(matches!(
            verify_boundedness_corollary(&f, &ScanDomain::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn boundedness_for_reflected_wright() {
        let g = wright(1.0).reflect();
        let rep = verify_boundedness_corollary(&g, &ScanDomain::default()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.bound, 2.0);
        // oracle: g(x) = 1 - e^x on x < 0 has sup 1 - e^-10
        assert!((rep.sup_estimate - (1.0 - (-10f64).exp())).abs() < 1e-3);
    }

    #[test]
    fn boundedness_bound_value() {
        // f'(0) = -1, f''(0) = -1/2
        let f = SmoothFunction::from_expr(Expr::c(-2.0) * (Expr::x() * 0.5).exp_m1()).unwrap();
        let rep = verify_boundedness_corollary(&f, &ScanDomain::default()).unwrap();
        assert_eq!(rep.bound, 4.0);
        assert!(rep.pass);
    }
}
