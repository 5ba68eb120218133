//! Third-order jets, the elementary expression library, and the Schwarzian.
//!
//! Every derivative the rest of the crate needs (`f'(0)`, `f''(0)`, `Sf`,
//! the Schwarzian of the auxiliary curve `A`) goes through [`jet_eval`]:
//! the expression is evaluated node by node on [`Jet3`] values, so results
//! are exact up to roundoff with no symbolic simplification.

mod expr;
mod jet;
mod parse;

pub use expr::{BinOp, Elementary, Expr, SmoothFunction};
pub use jet::{Jet3, Scalar};
pub use parse::parse_expr;

use crate::{Error, Result};

/// Relative threshold below which `f'` counts as zero.
pub const DERIV_TOL: f64 = 1e-12;

/// `tau_deriv` for a function whose derivatives are of order `scale`.
pub fn deriv_tolerance(scale: f64) -> f64 {
    DERIV_TOL * scale.abs().max(1.0)
}

/// `(f(x), f'(x), f''(x), f'''(x))`.
pub fn jet_eval(f: &SmoothFunction, x: f64) -> Result<Jet3> {
    f.jet(x)
}

/// Schwarzian derivative `f'''/f' - 3/2 (f''/f')^2` at `x`.
///
/// Fails with [`Error::CriticalPoint`] when `|f'(x)|` is within
/// [`deriv_tolerance`] of zero, using `|f'(x)|` itself as the scale.
pub fn schwarzian(f: &SmoothFunction, x: f64) -> Result<f64> {
    let j = f.jet(x)?;
    schwarzian_of(&j, x, deriv_tolerance(1.0))
}

/// Schwarzian of an already evaluated jet with an explicit tolerance.
pub fn schwarzian_of(j: &Jet3, x: f64, tol: f64) -> Result<f64> {
    if j.d1.abs() <= tol {
        return Err(Error::CriticalPoint { x, slope: j.d1 });
    }
    Ok(j.schwarzian())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wright(p: f64) -> SmoothFunction {
        SmoothFunction::new(Expr::param("p") * (-Expr::x()).exp_m1(), [("p".to_string(), p)]).unwrap()
    }

    fn fd_jet(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> [f64; 3] {
        // 5-point central differences
        let f2 = f(x + 2.0 * h);
        let f1 = f(x + h);
        let f0 = f(x);
        let m1 = f(x - h);
        let m2 = f(x - 2.0 * h);
        [
            (-f2 + 8.0 * f1 - 8.0 * m1 + m2) / (12.0 * h),
            (-f2 + 16.0 * f1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * h * h),
            (f2 - 2.0 * f1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
        ]
    }

    #[test]
    fn exp_at_zero() {
        let f = SmoothFunction::from_expr(Expr::x().exp()).unwrap();
        assert_eq!(jet_eval(&f, 0.0).unwrap(), Jet3::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn wright_nonlinearity_at_zero() {
        let j = jet_eval(&wright(1.5), 0.0).unwrap();
        assert_eq!(j, Jet3::new(0.0, -1.5, 1.5, -1.5));
    }

    #[test]
    fn ln_of_negative_is_domain_error() {
        let f = SmoothFunction::from_expr(Expr::x().ln()).unwrap();
        match jet_eval(&f, -1.0) {
            Err(Error::Domain { node, x, .. }) => {
                assert_eq!(node, "ln");
                assert_eq!(x, -1.0);
            }
            other => panic!("expected domain error, got {other:?}"),
        }
        let g = SmoothFunction::from_expr(1.0 / Expr::x()).unwrap();
        assert!(matches!(g.eval(0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn unbound_parameter_rejected() {
        assert!(SmoothFunction::from_expr(Expr::param("q") * Expr::x()).is_err());
    }

    #[test]
    fn schwarzian_of_wright_is_minus_half() {
        for p in [0.3, 1.0, 2.5] {
            for x in [-3.0, -0.5, 0.0, 0.7, 4.0] {
                let s = schwarzian(&wright(p), x).unwrap();
                assert!((s + 0.5).abs() < 1e-12, "p={p} x={x} S={s}");
            }
        }
    }

    #[test]
    fn schwarzian_of_rational_bound_vanishes() {
        let (a, b) = (-1.3, 0.8);
        let r = SmoothFunction::from_expr(a * a * Expr::x() / (a - b * Expr::x())).unwrap();
        for x in [-1.2, -0.3, 0.0, 0.4, 3.0, 20.0] {
            assert!(schwarzian(&r, x).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn schwarzian_of_tanh_matches_finite_differences() {
        // oracle: 5-point differences at step 1e-3 in the Sf formula
        let p = 1.7;
        let f = SmoothFunction::from_expr(-p * Expr::x().tanh()).unwrap();
        for x in [-1.5, -0.2, 0.0, 0.3, 1.1] {
            let [d1, d2, d3] = fd_jet(&|t: f64| -p * t.tanh(), x, 1e-3);
            let oracle = d3 / d1 - 1.5 * (d2 / d1).powi(2);
            let s = schwarzian(&f, x).unwrap();
            assert!((s - oracle).abs() < 1e-4, "x={x} S={s} fd={oracle}");
            assert!((s + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_point_is_reported() {
        let f = SmoothFunction::from_expr(Expr::x() * Expr::x()).unwrap();
        assert!(matches!(schwarzian(&f, 0.0), Err(Error::CriticalPoint { .. })));
    }

    #[test]
    fn reflection() {
        let g = wright(1.0).reflect();
        for x in [-2.0, 0.5, 3.0] {
            assert!((g.eval(x).unwrap() - (1.0 - f64::exp(x))).abs() < 1e-14);
        }
    }

    #[test]
    #[allow(clippy::type_complexity)]
    fn jets_match_finite_differences_for_library_functions() {
        let cases: Vec<(Expr, Box<dyn Fn(f64) -> f64>)> = vec![
            (Expr::x().atan(), Box::new(|t: f64| t.atan())),
            ((Expr::x() + 2.0).ln(), Box::new(|t: f64| (t + 2.0).ln())),
            ((Expr::x() * 0.5).ln_1p(), Box::new(|t: f64| (0.5 * t).ln_1p())),
            ((Expr::x() + 3.0).powf(-1.5), Box::new(|t: f64| (t + 3.0).powf(-1.5))),
            (Expr::x().powf(3.0), Box::new(|t: f64| t.powi(3))),
        ];
        for (e, g) in cases {
            let f = SmoothFunction::from_expr(e).unwrap();
            for x in [-0.9, 0.1, 1.3] {
                let j = f.jet(x).unwrap();
                let [d1, d2, d3] = fd_jet(&*g, x, 1e-3);
                assert!((j.v - g(x)).abs() < 1e-14);
                assert!((j.d1 - d1).abs() < 1e-6 * (1.0 + d1.abs()));
                assert!((j.d2 - d2).abs() < 1e-5 * (1.0 + d2.abs()));
                assert!((j.d3 - d3).abs() < 1e-4 * (1.0 + d3.abs()));
            }
        }
    }
}
