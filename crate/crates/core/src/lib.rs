//! Geometric probability over convex bodies.
//!
//! The crate evaluates closed-form moments of random simplices in balls,
//! estimates the same quantities by Monte Carlo on arbitrary convex bodies,
//! implements the moving-halfspace derivative formulas for `det A(K)` and for
//! expectations of symmetric functions, and provides planar Steiner
//! symmetrization and Blaschke shaking on convex polygons.
//!
//! Every Monte Carlo routine is a pure function of its inputs and a [`Seed`]:
//! sample `i` of an estimator always draws from substream `i` of the seed, so
//! results are bitwise reproducible for any number of worker threads.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod bodies;
pub mod derivatives;
mod error;
pub mod estimators;
pub mod exact;
pub mod experiments;
pub mod linalg;
pub mod sampling;
pub mod symmetry2d;

pub use bodies::{BoundingBox, ConvexBody, Halfspace, Point, Polygon2D};
pub use error::{Error, Result};
pub use estimators::{CovarianceEstimate, MomentEstimate};
pub use exact::ExactValue;
pub use sampling::{SampleStream, Seed};

/// Largest supported ambient dimension for bodies and estimators.
pub const MAX_DIM: usize = 8;
