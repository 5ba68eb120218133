//! The two-variable function `L(zeta, s)` whose negativity on the box
//! `zeta in [-1.5, -1.25]`, `s in [-1, 0]` orders `B` above `R`, and the
//! roots `A-(zeta) < A+(zeta)` of its `s`-derivative.

use serde::Serialize;

use crate::{Error, Result};

/// Right end of the interval `J = [-3/2, -2/3 - sqrt(7)/6)` on which
/// `A-` and `A+` are continuous.
pub fn j_upper() -> f64 {
    -2.0 / 3.0 - 7f64.sqrt() / 6.0
}

pub const ZETA_RANGE: (f64, f64) = (-1.5, -1.25);
pub const S_RANGE: (f64, f64) = (-1.0, 0.0);

/// `L(zeta, s) = s - zeta - ln(1 + s - zeta)
///     + 2 (zeta + 1/2)^2 (s - zeta)^2 / ((2 zeta + 1) zeta^2 + (2/3) zeta (s - zeta))`.
pub fn lemma_l(zeta: f64, s: f64) -> Result<f64> {
    let w = s - zeta;
    if !(1.0 + w > 0.0) {
        return Err(Error::domain("L", s, format!("1 + s - zeta = {} <= 0", 1.0 + w)));
    }
    let den = (2.0 * zeta + 1.0) * zeta * zeta + (2.0 / 3.0) * zeta * w;
    if den == 0.0 {
        return Err(Error::domain("L", s, "vanishing denominator"));
    }
    let h = zeta + 0.5;
    Ok(w - w.ln_1p() + 2.0 * h * h * w * w / den)
}

/// `dL/ds` in factored form,
/// `(s - zeta)(s - A-)(s - A+)(12 zeta^2 + 16 zeta + 3) / (zeta (1 + s - zeta) (6 zeta^2 + zeta + 2 s)^2)`,
/// with the quadratic factor expanded so it is defined for every `zeta`.
pub fn lemma_l_ds(zeta: f64, s: f64) -> Result<f64> {
    let w = s - zeta;
    let q = 6.0 * zeta * zeta + zeta + 2.0 * s;
    let den = zeta * (1.0 + w) * q * q;
    if !(1.0 + w > 0.0) || den == 0.0 {
        return Err(Error::domain("dL/ds", s, "outside the domain of L"));
    }
    let z2 = zeta * zeta;
    let quad = (12.0 * z2 + 16.0 * zeta + 3.0) * s * s
        + (72.0 * z2 * z2 + 108.0 * z2 * zeta + 46.0 * z2 + 15.0 * zeta + 3.0) * s
        + (-36.0 * z2 * z2 * zeta - 12.0 * z2 * z2 + 55.0 * z2 * zeta + 36.0 * z2 + 6.0 * zeta);
    Ok(w * quad / den)
}

/// `(A-(zeta), A+(zeta))` for `zeta in J`.
pub fn lemma_a_pm(zeta: f64) -> Result<(f64, f64)> {
    if !(zeta >= -1.5 && zeta < j_upper()) {
        return Err(Error::domain(
            "A+-",
            zeta,
            format!("zeta outside [-1.5, {})", j_upper()),
        ));
    }
    let z2 = zeta * zeta;
    let den = 2.0 * (12.0 * z2 + 16.0 * zeta + 3.0);
    let disc = (2.0 * zeta + 1.0) * (72.0 * z2 * zeta - 12.0 * z2 - 6.0 * zeta + 1.0);
    if den == 0.0 || disc < 0.0 {
        return Err(Error::domain(
            "A+-",
            zeta,
            "negative discriminant or vanishing denominator",
        ));
    }
    let centre = -(72.0 * z2 * z2 + 108.0 * z2 * zeta + 46.0 * z2 + 15.0 * zeta + 3.0) / den;
    let spread = 3.0 * (zeta + 1.0) * (2.0 * zeta + 1.0) * disc.sqrt() / den;
    let (lo, hi) = if spread <= 0.0 {
        (centre + spread, centre - spread)
    } else {
        (centre - spread, centre + spread)
    };
    // the displayed `+` branch is the larger root on J
    debug_assert!(lo <= hi);
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoxMaximum {
    pub max: f64,
    pub zeta: f64,
    pub s: f64,
    pub points: usize,
}

/// Maximum of `L` over an `n x n` uniform grid of the box, corners included.
pub fn lemma_l_box_max(n: usize) -> Result<BoxMaximum> {
    let zs = crate::grid::uniform(ZETA_RANGE.0, ZETA_RANGE.1, n);
    let ss = crate::grid::uniform(S_RANGE.0, S_RANGE.1, n);
    let mut best = BoxMaximum {
        max: f64::NEG_INFINITY,
        zeta: f64::NAN,
        s: f64::NAN,
        points: n * n,
    };
    for &zeta in &zs {
        for &s in &ss {
            let v = lemma_l(zeta, s)?;
            if v > best.max {
                best.max = v;
                best.zeta = zeta;
                best.s = s;
            }
        }
    }
    Ok(best)
}
