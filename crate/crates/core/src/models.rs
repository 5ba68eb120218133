//! The worked equations in normalized form `y'(s) = F(y(s - 1))`.
//!
//! Each model rescales time by its delay `h` so that the delay becomes 1
//! and `h` multiplies the nonlinearity.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::jets::{Expr, SmoothFunction};
use crate::{Error, Result};

/// Stability threshold for `-f'(0)`.
pub const CRITERION_THRESHOLD: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ModelName {
    Wright,
    FoodLimitation,
    Allee,
    Custom,
}

impl ModelName {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Wright => "wright",
            ModelName::FoodLimitation => "food-limitation",
            ModelName::Allee => "allee",
            ModelName::Custom => "custom",
        }
    }
}

/// Coordinate change between the original state `x` and the normalized
/// state `y`, plus the time scale `t = time_scale * s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Transform {
    /// `y = -ln(1 + x)` on `x > -1`.
    LogShift {
        time_scale: f64,
    },
    /// `y = -ln(x / scale)` on `x > 0`.
    LogScale {
        scale: f64,
        time_scale: f64,
    },
    Identity,
}

impl Transform {
    pub fn forward(&self, x: f64) -> Result<f64> {
        match *self {
            Transform::LogShift { .. } => {
                if !(x > -1.0) {
                    return Err(Error::domain("transform", x, "original state must exceed -1"));
                }
                Ok(-x.ln_1p())
            }
            Transform::LogScale { scale, .. } => {
                if !(x > 0.0) {
                    return Err(Error::domain("transform", x, "original state must be positive"));
                }
                Ok(-(x / scale).ln())
            }
            Transform::Identity => Ok(x),
        }
    }

    pub fn backward(&self, y: f64) -> f64 {
        match *self {
            Transform::LogShift { .. } => (-y).exp_m1(),
            Transform::LogScale { scale, .. } => scale * (-y).exp(),
            Transform::Identity => y,
        }
    }

    pub fn time_scale(&self) -> f64 {
        match *self {
            Transform::LogShift { time_scale } | Transform::LogScale { time_scale, .. } => time_scale,
            Transform::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: ModelName,
    pub params: BTreeMap<String, f64>,
    pub f: SmoothFunction,
    /// `F'(0)` in closed form.
    pub slope0: f64,
    pub criterion_value: f64,
    pub criterion_threshold: f64,
    pub transform: Transform,
    /// Positive equilibrium of the original equation, where there is one.
    pub equilibrium: Option<f64>,
    /// Allee only: whether `f` has a minimum (`b > 0`).
    pub unimodal: Option<bool>,
}

impl ModelSpec {
    pub fn passes(&self) -> bool {
        self.criterion_value <= self.criterion_threshold
    }

    /// `3/2 < -f'(0) < pi/2`: beyond the proved bound but inside the
    /// conjectured one.
    pub fn in_conjecture_window(&self) -> bool {
        let s = -self.slope0;
        s > CRITERION_THRESHOLD && s < FRAC_PI_2
    }

    /// Right-hand side of the original equation, `x'(t)` given `x(t)` and
    /// `x(t - h)`.
    pub fn original_rhs(&self, x_now: f64, x_delayed: f64) -> f64 {
        let p = |k: &str| self.params[k];
        match self.name {
            ModelName::Wright => -p("p") * x_delayed * (1.0 + x_now),
            ModelName::FoodLimitation => {
                let (r, c) = (p("r"), p("c"));
                -r * (1.0 + x_now) * x_delayed / (1.0 + c * r * (1.0 + x_delayed))
            }
            ModelName::Allee => x_now * (p("a") + p("b") * x_delayed - p("c") * x_delayed * x_delayed),
            ModelName::Custom => self.f.eval(x_delayed).unwrap_or(f64::NAN),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} must be positive, got {v}")))
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn u() -> Expr {
    (-Expr::x()).exp_m1()
}

/// `x'(t) = -p x(t-1)(1 + x(t))`, normalized to `F(y) = p (e^{-y} - 1)`.
pub fn wright(p: f64) -> Result<ModelSpec> {
    positive("p", p)?;
    let ps = params(&[("p", p)]);
    let f = SmoothFunction::new(Expr::param("p") * u(), ps.clone())?;
    Ok(ModelSpec {
        name: ModelName::Wright,
        params: ps,
        f,
        slope0: -p,
        criterion_value: p,
        criterion_threshold: CRITERION_THRESHOLD,
        transform: Transform::LogShift { time_scale: 1.0 },
        equilibrium: None,
        unimodal: None,
    })
}

/// `x'(t) = -r (1 + x(t)) x(t-h) / (1 + c r (1 + x(t-h)))`, normalized to
/// `F(y) = r h g(e^{-y} - 1)` with `g(u) = u / (1 + c r (1 + u))`.
pub fn food_limitation(r: f64, c: f64, h: f64) -> Result<ModelSpec> {
    positive("r", r)?;
    positive("h", h)?;
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Precondition(format!("c must be non-negative, got {c}")));
    }
    let ps = params(&[("r", r), ("c", c), ("h", h)]);
    let (pr, pc, ph) = (Expr::param("r"), Expr::param("c"), Expr::param("h"));
    let g = u() / (Expr::c(1.0) + pc * pr.clone() * (Expr::c(1.0) + u()));
    let f = SmoothFunction::new(pr * ph * g, ps.clone())?;
    let value = r * h / (1.0 + c * r);
    Ok(ModelSpec {
        name: ModelName::FoodLimitation,
        params: ps,
        f,
        slope0: -value,
        criterion_value: value,
        criterion_threshold: CRITERION_THRESHOLD,
        transform: Transform::LogShift { time_scale: h },
        equilibrium: None,
        unimodal: None,
    })
}

/// Positive root of `a + b e - c e^2 = 0`.
pub fn allee_equilibrium(a: f64, b: f64, c: f64) -> f64 {
    (b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * c)
}

/// `x'(t) = x(t) [a + b x(t-h) - c x(t-h)^2]` with `x = e* e^{-y}`,
/// normalized to `F(y) = -h (a + b e* e^{-y} - c (e* e^{-y})^2)`.
///
/// `F` is assembled as `h e* u ((2 c e* - b) + c e* u)` with
/// `u = e^{-y} - 1`, which is the same function with `F(0) = 0` exactly.
pub fn allee(a: f64, b: f64, c: f64, h: f64) -> Result<ModelSpec> {
    positive("a", a)?;
    positive("c", c)?;
    positive("h", h)?;
    if !b.is_finite() {
        return Err(Error::Precondition(format!("b must be finite, got {b}")));
    }
    let e = allee_equilibrium(a, b, c);
    let ps = params(&[("a", a), ("b", b), ("c", c), ("h", h), ("e_star", e)]);
    let (pb, pc, ph, pe) = (
        Expr::param("b"),
        Expr::param("c"),
        Expr::param("h"),
        Expr::param("e_star"),
    );
    let lin = Expr::c(2.0) * pc.clone() * pe.clone() - pb;
    let f = SmoothFunction::new(ph * pe.clone() * u() * (lin + pc * pe * u()), ps.clone())?;
    let value = (2.0 * c * e - b) * h * e;
    Ok(ModelSpec {
        name: ModelName::Allee,
        params: ps,
        f,
        slope0: -value,
        criterion_value: value,
        criterion_threshold: CRITERION_THRESHOLD,
        transform: Transform::LogScale {
            scale: e,
            time_scale: h,
        },
        equilibrium: Some(e),
        unimodal: Some(b > 0.0),
    })
}

/// A user-supplied nonlinearity, already in normalized form.
pub fn custom(f: SmoothFunction) -> Result<ModelSpec> {
    let j = f.jet(0.0)?;
    Ok(ModelSpec {
        name: ModelName::Custom,
        params: f.params().clone(),
        f,
        slope0: j.d1,
        criterion_value: -j.d1,
        criterion_threshold: CRITERION_THRESHOLD,
        transform: Transform::Identity,
        equilibrium: None,
        unimodal: None,
    })
}
