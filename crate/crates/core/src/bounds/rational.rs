use serde::Serialize;

use crate::jets::{Expr, Jet3, SmoothFunction};
use crate::{Error, Result};

/// The rational comparison function `r(x) = a^2 x / (a - b x)` on `(mu, inf)`,
/// `mu = a/b`, with `a < 0 < b`.
///
/// For a nonlinearity `f` the natural choice is `a = f'(0)`, `b = f''(0)/2`:
/// `r` then has the same 2-jet as `f` at 0 and zero Schwarzian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalBound {
    pub a: f64,
    pub b: f64,
}

impl RationalBound {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= 0.0 || b <= 0.0 {
            return Err(Error::Precondition(format!(
                "rational bound needs a < 0 < b, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// Bound matching the 2-jet of `f` at 0.
    pub fn from_jet(j: &Jet3) -> Result<Self> {
        Self::new(j.d1, 0.5 * j.d2)
    }

    /// Left endpoint of the domain.
    pub fn mu(&self) -> f64 {
        self.a / self.b
    }

    /// Nonzero solution of `r(x) = -x`.
    pub fn x2(&self) -> f64 {
        (self.a + self.a * self.a) / self.b
    }

    /// `lim r(x)` as `x -> inf`.
    pub fn limit(&self) -> f64 {
        -self.a * self.a / self.b
    }

    /// `-b/a > 0`.
    pub fn theta(&self) -> f64 {
        -self.b / self.a
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > self.mu()) {
            return Err(Error::domain("r", x, format!("x must exceed mu = {}", self.mu())));
        }
        Ok(self.a * self.a * x / (self.a - self.b * x))
    }

    /// Derivative `r'(x) = a^3 / (a - b x)^2`.
    pub fn slope(&self, x: f64) -> f64 {
        let d = self.a - self.b * x;
        self.a * self.a * self.a / (d * d)
    }

    /// Inverse `rho(y) = a y / (a^2 + b y)` on `(-a^2/b, inf)`.
    pub fn rho(&self, y: f64) -> Result<f64> {
        if !(y > self.limit()) {
            return Err(Error::domain("rho", y, format!("y must exceed {}", self.limit())));
        }
        Ok(self.a * y / (self.a * self.a + self.b * y))
    }

    /// `int_x^0 r(t) dt` in closed form, `(a^3/b^2) (ln(1 + theta x) - theta x)`.
    pub fn integral_to_zero(&self, x: f64) -> Result<f64> {
        if !(x > self.mu()) {
            return Err(Error::domain("int r", x, format!("x must exceed mu = {}", self.mu())));
        }
        let c = self.a * self.a * self.a / (self.b * self.b);
        Ok(c * log1p_minus_x(self.theta() * x))
    }

    /// Antiderivative `P(t) = -(a^2/b) t - (a^3/b^2) ln|a - b t|` of `r`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        -(a * a / b) * t - (a * a * a / (b * b)) * (a - b * t).abs().ln()
    }

    /// `r` as an expression in `x`, in the same operation order as [`eval`](Self::eval).
    pub fn to_expr(&self) -> Expr {
        let (a, b) = (self.a, self.b);
        Expr::c(a) * Expr::c(a) * Expr::x() / (Expr::c(a) - Expr::c(b) * Expr::x())
    }

    pub fn to_function(&self) -> SmoothFunction {
        SmoothFunction::from_expr(self.to_expr()).expect("no parameters")
    }
}

/// `ln(1 + u) - u` without cancellation for small `u`.
pub fn log1p_minus_x(u: f64) -> f64 {
    if u.abs() < 0.1 {
        // -u^2/2 + u^3/3 - ...; 0.1^32 is far below roundoff
        let mut term = u;
        let mut sum = 0.0;
        for k in 2..34 {
            term *= -u;
            sum += term / k as f64;
        }
        sum
    } else {
        u.ln_1p() - u
    }
}
