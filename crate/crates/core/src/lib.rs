//! Two-parameter p-variation on finite grids.
//!
//! The crate computes and cross-checks two notions of p-variation for a
//! function of two variables, both built from rectangular increments
//! `f(b,d) - f(a,d) - f(b,c) + f(a,c)`:
//!
//! * the grid-like variation `V_p`, a supremum over product partitions
//!   induced by one dissection per axis, and
//! * the controlled variation `|f|_{p-var}`, the same supremum taken over
//!   every rectangulation (pinwheels included).
//!
//! Around these two engines sit the verification harnesses: the sandwich
//! `|f|_{(p+eps)-var} <= c(p, eps) V_p <= c |f|_{p-var}`, super-additivity of
//! rectangle functions, discrete Young and Young-Towghi maximal
//! inequalities with their zeta constants, and the fractional Brownian
//! motion covariance examples.
//!
//! Everything operates on [`GridFunction`] values sampled on a rectangular
//! grid; suprema are taken over dissections made of grid points, which is
//! exact for grid-native data.

pub mod cli;
pub mod controls;
mod error;
pub mod fbm;
pub mod geometry;
pub mod gridfunc;
pub mod random;
pub mod report;
pub mod variation;
pub mod young;

pub use error::{Error, Result};
pub use geometry::{Dissection, GridIndexRect, Limits, Rect, RectPartition};
pub use gridfunc::GridFunction;
pub use report::{CheckRecord, InequalityReport, Tolerance, Witness};
pub use variation::{Method, VariationResult};
