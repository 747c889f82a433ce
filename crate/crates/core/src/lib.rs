//! Random triangles of unit area built from lognormal laws.
//!
//! - [`lognormal`]: the lognormal family and the densities of `x + 1/x`,
//!   its square root, and the scaled variant `√(x²/κ + κ/x²)`.
//! - [`triangle`]: triangle geometry (Heron's area, the area-preserving
//!   scaling, the unit-area surface and its two branches).
//! - [`models`]: the five generative models and their analytic densities.
//! - [`quadrature`]: adaptive Gauss–Kronrod engine used for every moment.
//! - [`montecarlo`] and [`gof`]: seeded batches, empirical statistics and
//!   goodness-of-fit tests.
//! - [`io`], [`commands`], [`verify`]: file formats and the CLI surface.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod commands;
pub mod density;
pub mod error;
pub mod gof;
pub mod io;
pub mod lognormal;
pub mod models;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod triangle;
pub mod verify;

pub use density::DensityFn;
pub use error::{Error, Result};
pub use lognormal::LognormalParams;
pub use models::ModelKind;
pub use montecarlo::SampleBatch;
pub use triangle::Triangle;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
