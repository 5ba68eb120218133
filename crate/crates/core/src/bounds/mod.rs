//! The rational comparison function, the auxiliary curves built from it,
//! and the inequalities between them.

mod aux;
mod certificate;
mod lemma;
mod linear;
mod rational;
mod verify;

pub use aux::{AuxCurves, TAYLOR_RADIUS};
pub use certificate::{
    contraction_certificate, BoundMap, Certificate, Witness, DEFAULT_MAX_ITER, STRICT_DECREASE_TOL, TARGET,
};
pub use lemma::{j_upper, lemma_a_pm, lemma_l, lemma_l_box_max, lemma_l_ds, BoxMaximum, S_RANGE, ZETA_RANGE};
pub use linear::{linear_case_bounds, LinearCaseReport};
pub use rational::{log1p_minus_x, RationalBound};
pub use verify::{
    in_slope_window, verify_a_decreasing, verify_a_minus_r, verify_b_gt_r, verify_comparison, verify_d_gt_r,
    verify_jensen, GridCheck, DEFAULT_POINTS, DEFAULT_X_MAX, SLOPE_WINDOW,
};
