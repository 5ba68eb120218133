use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

/// Value and first three derivatives of a scalar function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Jet3 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const fn new(v: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Self { v, d1, d2, d3 }
    }

    /// Jet of the identity map at `x`.
    pub const fn variable(x: f64) -> Self {
        Self::new(x, 1.0, 0.0, 0.0)
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, 0.0)
    }

    /// Composes an outer function with this jet, given the outer function's
    /// value and first three derivatives at `self.v` (Faà di Bruno, order 3).
    pub fn chain(self, g0: f64, g1: f64, g2: f64, g3: f64) -> Self {
        let (u1, u2, u3) = (self.d1, self.d2, self.d3);
        Self {
            v: g0,
            d1: g1 * u1,
            d2: g2 * u1 * u1 + g1 * u2,
            d3: g3 * u1 * u1 * u1 + 3.0 * g2 * u1 * u2 + g1 * u3,
        }
    }

    pub fn recip(self) -> Self {
        let inv = 1.0 / self.v;
        let inv2 = inv * inv;
        self.chain(inv, -inv2, 2.0 * inv2 * inv, -6.0 * inv2 * inv2)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e, e)
    }

    /// `exp(u) - 1`, accurate for small `u`.
    pub fn exp_m1(self) -> Self {
        let e = self.v.exp();
        self.chain(self.v.exp_m1(), e, e, e)
    }

    pub fn ln(self) -> Self {
        let inv = 1.0 / self.v;
        self.chain(self.v.ln(), inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    /// `ln(1 + u)`, accurate for small `u`.
    pub fn ln_1p(self) -> Self {
        let inv = 1.0 / (1.0 + self.v);
        self.chain(self.v.ln_1p(), inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    pub fn tanh(self) -> Self {
        let t = self.v.tanh();
        // sech^2 directly; 1 - t^2 loses everything in the tails
        let s = {
            let c = self.v.cosh();
            1.0 / (c * c)
        };
        self.chain(t, s, -2.0 * t * s, -2.0 * s * s + 4.0 * t * t * s)
    }

    pub fn atan(self) -> Self {
        let u = self.v;
        let q = 1.0 / (1.0 + u * u);
        self.chain(u.atan(), q, -2.0 * u * q * q, (6.0 * u * u - 2.0) * q * q * q)
    }

    /// `self^k` for a constant real exponent.
    pub fn powf(self, k: f64) -> Self {
        let u = self.v;
        let term = |coeff: f64, e: f64| if coeff == 0.0 { 0.0 } else { coeff * u.powf(e) };
        self.chain(
            u.powf(k),
            term(k, k - 1.0),
            term(k * (k - 1.0), k - 2.0),
            term(k * (k - 1.0) * (k - 2.0), k - 3.0),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite() && self.d3.is_finite()
    }

    /// `f'''/f' - 3/2 (f''/f')^2`, without any tolerance check.
    pub fn schwarzian(&self) -> f64 {
        let q = self.d2 / self.d1;
        self.d3 / self.d1 - 1.5 * q * q
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2, self.d3 - o.d3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.v, -self.d1, -self.d2, -self.d3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
            d3: self.d3 * o.v + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.v * o.d3,
        }
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, c: f64) -> Jet3 {
        Jet3::new(self.v * c, self.d1 * c, self.d2 * c, self.d3 * c)
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(self, c: f64) -> Jet3 {
        Jet3 { v: self.v + c, ..self }
    }
}

/// Scalars an expression can be evaluated over: plain reals or jets.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn lift(c: f64) -> Self;
    fn value(&self) -> f64;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn tanh(self) -> Self;
    fn atan(self) -> Self;
    fn powf(self, k: f64) -> Self;
    fn all_finite(&self) -> bool;
}

impl Scalar for f64 {
    fn lift(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn powf(self, k: f64) -> Self {
        f64::powf(self, k)
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Jet3 {
    fn lift(c: f64) -> Self {
        Jet3::constant(c)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        Jet3::exp(self)
    }
    fn exp_m1(self) -> Self {
        Jet3::exp_m1(self)
    }
    fn ln(self) -> Self {
        Jet3::ln(self)
    }
    fn ln_1p(self) -> Self {
        Jet3::ln_1p(self)
    }
    fn tanh(self) -> Self {
        Jet3::tanh(self)
    }
    fn atan(self) -> Self {
        Jet3::atan(self)
    }
    fn powf(self, k: f64) -> Self {
        Jet3::powf(self, k)
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}
