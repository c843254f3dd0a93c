//! Confidence bands for a distribution function under bi-log-concavity.
//!
//! A distribution function `F` is bi-log-concave when both `log F` and
//! `log(1 - F)` are concave. This crate computes standard nonparametric
//! confidence bands, refines them to the bi-log-concave class, and turns the
//! refined band into bounds for hazards, moments and the moment generating
//! function.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod band;
pub mod bands;
pub mod blc_check;
pub mod concint;
pub mod dist;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod refine;
pub mod sample;
pub mod sim;

pub use band::{eval_band, BandFn, BoundsInterval};
pub use error::{Error, Result};
pub use grid::{build_grid, Grid};
pub use sample::Sample;
