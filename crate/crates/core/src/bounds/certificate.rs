//! Contraction certificate for the amplitude bound `M`.
//!
//! In an oscillating regime with `m < 0 < M` the bounds `m > D(M)`,
//! `m > r(-r(M)/2)`, `M < r(m)` and `M < R(m)` combine into `M < Phi(M)`
//! for a one-step map `Phi`. If `Phi(M) < M` for every `M > 0` then
//! `M = 0`. The certificate iterates `Phi` and checks that the orbit
//! decreases strictly to 0.

use serde::Serialize;

use super::aux::AuxCurves;
use super::verify::SLOPE_WINDOW;
use crate::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const STRICT_DECREASE_TOL: f64 = 1e-15;
pub const TARGET: f64 = 1e-12;

/// Factors within this distance of 1 count as neutral.
const NEUTRAL_TOL: f64 = 1e-9;
const NEUTRAL_GRID: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMap {
    /// `lambda(M) = r(r(-r(M)/2))`, linear factor `|a|^3 / 2`.
    Lambda,
    /// `R(D(M))`, linear factor `(a + 1/2)^2`.
    RAfterD,
}

impl BoundMap {
    pub fn for_slope(a: f64) -> Self {
        if a >= SLOPE_WINDOW.0 && a < SLOPE_WINDOW.1 {
            BoundMap::RAfterD
        } else {
            BoundMap::Lambda
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            BoundMap::Lambda => "lambda(M) = r(r(-r(M)/2))",
            BoundMap::RAfterD => "R(D(M))",
        }
    }
}

/// A step where the bound map failed to decrease.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub iteration: usize,
    pub m_k: f64,
    pub m_next: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub a: f64,
    pub b: f64,
    pub m0: f64,
    pub map: BoundMap,
    /// Derivative of the bound map at 0.
    pub factor: f64,
    pub certified: bool,
    pub iterations: usize,
    pub final_value: f64,
    /// Set when the orbit stopped decreasing.
    pub witness: Option<Witness>,
    /// Set when the factor is neutral and the orbit was still decreasing at
    /// the iteration cap: whether `Phi(M) < M` held on a grid of
    /// `[final_value, m0]`.
    pub neutral_grid_check: Option<bool>,
}

struct Maps {
    ac: AuxCurves,
    map: BoundMap,
}

impl Maps {
    fn apply(&self, m: f64) -> Result<f64> {
        let r = &self.ac.base;
        match self.map {
            BoundMap::Lambda => r.eval(r.eval(-0.5 * r.eval(m)?)?),
            BoundMap::RAfterD => self.ac.curve_r(self.ac.curve_d(m)?),
        }
    }
}

/// Iterates the bound map for slope `a` and curvature `b` from `m0`.
///
/// `Certified` requires strict decrease (by more than 1e-15 each step)
/// and either reaching `1e-12`, or, when the linear factor is 1 so that
/// the decay is only algebraic, exhausting `max_iter` while still
/// decreasing and passing a grid check of `Phi(M) < M` on the range swept
/// by the orbit.
pub fn contraction_certificate(a: f64, b: f64, m0: f64, max_iter: usize) -> Result<Certificate> {
    if !(m0 > 0.0) {
        return Err(Error::Precondition(format!("M0 must be positive, got {m0}")));
    }
    let ac = AuxCurves::from_params(a, b)?;
    let map = BoundMap::for_slope(a);
    let factor = match map {
        BoundMap::Lambda => 0.5 * a.abs().powi(3),
        BoundMap::RAfterD => (a + 0.5) * (a + 0.5),
    };
    let maps = Maps { ac, map };
    let mut cert = Certificate {
        a,
        b,
        m0,
        map,
        factor,
        certified: false,
        iterations: 0,
        final_value: m0,
        witness: None,
        neutral_grid_check: None,
    };
    let mut m = m0;
    for k in 0..max_iter {
        let next = maps.apply(m)?;
        cert.iterations = k + 1;
        if !(next < m - STRICT_DECREASE_TOL) {
            cert.witness = Some(Witness {
                iteration: k,
                m_k: m,
                m_next: next,
            });
            cert.final_value = m;
            return Ok(cert);
        }
        m = next;
        cert.final_value = m;
        if m < TARGET {
            cert.certified = true;
            return Ok(cert);
        }
    }
    if (factor - 1.0).abs() <= NEUTRAL_TOL {
        let ok = neutral_grid(&maps, m, m0)?;
        cert.neutral_grid_check = Some(ok);
        cert.certified = ok;
    }
    Ok(cert)
}

fn neutral_grid(maps: &Maps, lo: f64, hi: f64) -> Result<bool> {
    if !(lo > 0.0 && hi > lo) {
        return Ok(false);
    }
    let ratio = (hi / lo).ln();
    for i in 0..=NEUTRAL_GRID {
        let m = lo * (ratio * i as f64 / NEUTRAL_GRID as f64).exp();
        if !(maps.apply(m)? < m) {
            return Ok(false);
        }
    }
    Ok(true)
}
