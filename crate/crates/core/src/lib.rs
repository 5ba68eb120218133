//! Numerical machinery for the scalar delay equation `x'(t) = f(x(t-1))`
//! when `f` has negative feedback, is bounded below and has negative
//! Schwarzian derivative.
//!
//! The crate is split along the lines of the analysis:
//!
//! - [`jets`]: third-order forward-mode jets over an expression tree of
//!   elementary functions, and the Schwarzian derivative built on them.
//! - [`hypotheses`]: grid evidence for the standing hypotheses and the
//!   shape classification of admissible nonlinearities.
//! - [`bounds`]: the rational comparison function `r(x,a,b)`, its inverse,
//!   the auxiliary curves `A`, `B`, `D`, `R`, the `L` inequality and the
//!   contraction certificate for the 3/2 condition.
//! - [`dde`]: a method-of-steps integrator with dense output, extremum
//!   detection, return maps and empirical amplitude bounds.
//! - [`models`]: the Wright, food-limitation and Allee equations in
//!   normalized delay-1 form.
//! - [`cli`]: configuration and commands behind the `wright` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod dde;
pub mod grid;
pub mod hypotheses;
pub mod jets;
pub mod models;
pub mod quadrature;

mod error;

pub use error::{Error, Result};
