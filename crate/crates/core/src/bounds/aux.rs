use serde::Serialize;

use super::rational::RationalBound;
use crate::jets::{Expr, SmoothFunction};
use crate::quadrature::adaptive_simpson;
use crate::{Error, Result};

/// Below this `|x|` the curves `A`, `B` are summed from their Taylor series.
pub const TAYLOR_RADIUS: f64 = 1e-6;

/// The auxiliary curves built from one rational bound `r`:
///
/// - `A(x) = x + r(x) + (1/r(x)) int_x^0 r`,
/// - `B(x) = (1/r(x)) int_{-r(x)}^0 r`,
/// - `D(x) = A(x)` where `r(x) < -x`, else `B(x)`,
/// - `R(x) = r(x, A'(0), A''(0)/2)`, only for `a < -1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuxCurves {
    pub base: RationalBound,
    /// `A'(0) = a + 1/2`.
    pub a_prime0: f64,
    /// `A''(0) = 2b (1 + 1/(6a))`.
    pub a_double_prime0: f64,
    /// `2 A'(0) / A''(0)`, the left end of the domain of `R`.
    pub nu: Option<f64>,
    pub upper: Option<RationalBound>,
}

impl AuxCurves {
    pub fn new(base: RationalBound) -> Self {
        let (a, b) = (base.a, base.b);
        let a_prime0 = a + 0.5;
        let a_double_prime0 = 2.0 * b * (1.0 + 1.0 / (6.0 * a));
        let upper = if a < -1.0 {
            Some(RationalBound::new(a_prime0, 0.5 * a_double_prime0).expect("a < -1 gives valid R"))
        } else {
            None
        };
        Self {
            base,
            a_prime0,
            a_double_prime0,
            nu: upper.map(|u| u.mu()),
            upper,
        }
    }

    pub fn from_params(a: f64, b: f64) -> Result<Self> {
        Ok(Self::new(RationalBound::new(a, b)?))
    }

    fn a_taylor(&self, x: f64) -> f64 {
        // coefficient of x^k: b^(k-1) (k(k+1) a + 1) / (k(k+1) a^(k-1))
        let (a, b) = (self.base.a, self.base.b);
        let mut sum = 0.0;
        let mut pw = x;
        for k in 1..=4 {
            let kk = (k * (k + 1)) as f64;
            let c = b.powi(k - 1) * (kk * a + 1.0) / (kk * a.powi(k - 1));
            sum += c * pw;
            pw *= x;
        }
        sum
    }

    fn b_taylor(&self, x: f64) -> f64 {
        let (a, b) = (self.base.a, self.base.b);
        let c1 = -0.5 * a * a;
        let c2 = a * b * (2.0 * a - 3.0) / 6.0;
        let c3 = b * b * (-15.0 * a * a + 40.0 * a - 30.0) / 60.0;
        let c4 = b * b * b * (a * (4.0 * a * a - 15.0 * a + 20.0) - 10.0) / (20.0 * a);
        x * (c1 + x * (c2 + x * (c3 + x * c4)))
    }

    pub fn curve_a(&self, x: f64) -> Result<f64> {
        let rx = self.base.eval(x).map_err(|_| self.outside("A", x))?;
        if x == 0.0 {
            return Ok(0.0);
        }
        if x.abs() < TAYLOR_RADIUS {
            return Ok(self.a_taylor(x));
        }
        Ok(x + rx + self.base.integral_to_zero(x)? / rx)
    }

    /// `A` with the integral done by adaptive quadrature.
    pub fn curve_a_quadrature(&self, x: f64) -> Result<f64> {
        let rx = self.base.eval(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        let int = adaptive_simpson(|t| self.base.eval(t).unwrap_or(f64::NAN), x, 0.0, 1e-12);
        Ok(x + rx + int / rx)
    }

    /// `A = G(r(x))` with `G(z) = z + int_0^1 rho(v z) dv`, by quadrature.
    pub fn curve_a_via_g(&self, x: f64) -> Result<f64> {
        let z = self.base.eval(x)?;
        let int = adaptive_simpson(|v| self.base.rho(v * z).unwrap_or(f64::NAN), 0.0, 1.0, 1e-13);
        Ok(z + int)
    }

    pub fn curve_b(&self, x: f64) -> Result<f64> {
        let rx = self.base.eval(x).map_err(|_| self.outside("B", x))?;
        if x == 0.0 {
            return Ok(0.0);
        }
        if x.abs() < TAYLOR_RADIUS {
            return Ok(self.b_taylor(x));
        }
        let u = -rx;
        if !(u > self.base.mu()) {
            return Err(Error::domain("B", x, "-r(x) leaves the domain of r"));
        }
        Ok(self.base.integral_to_zero(u)? / rx)
    }

    /// `B~(u) = int_0^1 r(z u) dz = (zeta/(u theta)) (u - ln(1 + theta u)/theta)`,
    /// so that `B(x) = B~(-r(x))`.
    pub fn b_tilde(&self, u: f64) -> Result<f64> {
        let zeta = self.base.a;
        let theta = self.base.theta();
        if !(1.0 + theta * u > 0.0) {
            return Err(Error::domain("B~", u, "1 + theta u <= 0"));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok(zeta / (u * theta) * (u - (theta * u).ln_1p() / theta))
    }

    pub fn curve_b_quadrature(&self, x: f64) -> Result<f64> {
        let rx = self.base.eval(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        let int = adaptive_simpson(|s| self.base.eval(s).unwrap_or(f64::NAN), -rx, 0.0, 1e-12);
        Ok(int / rx)
    }

    /// `D` on `[0, inf)`.
    pub fn curve_d(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::domain("D", x, "D is defined on x >= 0"));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        if self.base.eval(x)? < -x {
            self.curve_a(x)
        } else {
            self.curve_b(x)
        }
    }

    /// `R(x) = r(x, A'(0), A''(0)/2)` on `(nu, inf)`.
    pub fn curve_r(&self, x: f64) -> Result<f64> {
        let upper = self
            .upper
            .ok_or_else(|| Error::Precondition(format!("R needs f'(0) < -1, got {}", self.base.a)))?;
        upper
            .eval(x)
            .map_err(|_| Error::domain("R", x, format!("x must exceed nu = {}", upper.mu())))
    }

    /// `A(x) - R(x)` without cancellation near 0.
    ///
    /// The two curves share their 2-jet at 0, so for small `|x|` the
    /// difference is summed from the cubic and quartic Taylor terms.
    pub fn a_minus_r(&self, x: f64) -> Result<f64> {
        let upper = self
            .upper
            .ok_or_else(|| Error::Precondition(format!("R needs f'(0) < -1, got {}", self.base.a)))?;
        let small = 1e-3;
        if (self.base.theta() * x).abs() < small && (upper.theta() * x).abs() < small {
            let (a, b) = (self.base.a, self.base.b);
            let coeff_a = |k: i32| {
                let kk = (k * (k + 1)) as f64;
                b.powi(k - 1) * (kk * a + 1.0) / (kk * a.powi(k - 1))
            };
            let coeff_r = |k: i32| upper.a * (upper.b / upper.a).powi(k - 1);
            let c3 = coeff_a(3) - coeff_r(3);
            let c4 = coeff_a(4) - coeff_r(4);
            return Ok(x * x * x * (c3 + c4 * x));
        }
        Ok(self.curve_a(x)? - self.curve_r(x)?)
    }

    /// `A` as an expression in `x`, for jet evaluation away from 0.
    pub fn a_expr(&self) -> Expr {
        let (a, b) = (self.base.a, self.base.b);
        let theta = self.base.theta();
        let r = self.base.to_expr();
        let integral =
            Expr::c(a * a / b) * Expr::x() + Expr::c(a * a * a / (b * b)) * (Expr::c(theta) * Expr::x()).ln_1p();
        Expr::x() + r.clone() + integral / r
    }

    pub fn a_function(&self) -> SmoothFunction {
        SmoothFunction::from_expr(self.a_expr()).expect("no parameters")
    }

    fn outside(&self, curve: &str, x: f64) -> Error {
        Error::domain(curve, x, format!("x must exceed mu = {}", self.base.mu()))
    }
}
