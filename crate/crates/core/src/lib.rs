//! Numerical core for graphical 3-tori: the graph of a periodic function
//! over a flat torus, its scalar curvature, level-set profiles, and the
//! volume and flat-distance bounds built from them.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line live in the `graphtori` crate.
#![cfg_attr(not(test), no_std)]
// NaN must fail range checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod convergence;
pub mod curvature;
pub mod error;
pub mod field;
pub mod lattice;
pub mod levelset;
pub mod math;
pub mod membership;
pub mod stability;

pub use curvature::GraphTorus;
pub use error::{Error, Result};
pub use field::{FieldFamily, Grid, ScalarField};
pub use lattice::FlatTorus;
pub use levelset::{LevelSetAnalyzer, LevelSetProfile};
pub use stability::StabilityReport;
