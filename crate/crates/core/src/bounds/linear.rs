//! Bounds for the case `f''(0) = 0`, where `r` degenerates to the line
//! `a x` and `A`, `B` become linear.

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinearCaseReport {
    pub a: f64,
    pub m_upper: f64,
    pub m_lower: f64,
    /// `A(M) = (a + 1/2) M`, a lower bound for `m` when `a <= -1`.
    pub a_of_upper: Option<f64>,
    /// `A(m) = (a + 1/2) m`, an upper bound for `M` when `a <= -1`.
    pub a_of_lower: Option<f64>,
    /// `B(M) = -a^2 M / 2`, a lower bound for `m`.
    pub b_of_upper: f64,
    /// `r_1(m) = a m`, an upper bound for `M`.
    pub r1_of_lower: f64,
    /// `(a + 1/2)^2`.
    pub factor_a: f64,
    /// `|a|^3 / 2`.
    pub factor_lambda: f64,
    /// Whether the applicable factor is at most 1; the bounds are strict,
    /// so a factor of exactly 1 still forces `M = 0`.
    pub contracts: bool,
}

pub fn linear_case_bounds(a: f64, upper: f64, lower: f64) -> Result<LinearCaseReport> {
    if !(a < 0.0) || !(lower < 0.0 && upper > 0.0) {
        return Err(Error::Precondition(format!(
            "linear bounds need a < 0 and m < 0 < M, got a = {a}, m = {lower}, M = {upper}"
        )));
    }
    let steep = a <= -1.0;
    let factor_a = (a + 0.5) * (a + 0.5);
    let factor_lambda = 0.5 * a.abs().powi(3);
    let contracts = if steep && a >= -1.5 {
        factor_a <= 1.0 || factor_lambda <= 1.0
    } else {
        factor_lambda <= 1.0
    };
    Ok(LinearCaseReport {
        a,
        m_upper: upper,
        m_lower: lower,
        a_of_upper: steep.then_some((a + 0.5) * upper),
        a_of_lower: steep.then_some((a + 0.5) * lower),
        b_of_upper: -0.5 * a * a * upper,
        r1_of_lower: a * lower,
        factor_a,
        factor_lambda,
        contracts,
    })
}
