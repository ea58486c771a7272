//! Normalized Ricci flow on generalized flag manifolds with two or three
//! isotropy summands.
//!
//! The flow of a diagonal invariant metric `(x_1, ..., x_s)` is a rational
//! vector field on the positive cone. Multiplying it by a positive monomial
//! turns it into a homogeneous polynomial field, whose Poincaré
//! compactification has its equilibria on the equator. Those equilibria are
//! exactly the invariant Einstein metrics up to scale, which this crate also
//! computes directly as an independent cross-check.
//!
//! Module map:
//!
//! * [`catalog`]: the flag manifolds, their summand dimensions and structure constants.
//! * [`curvature`]: Ricci components, scalar curvature and the Einstein residual.
//! * [`flow`]: the flow velocity and its denominator-free polynomial form.
//! * [`compactify`]: Poincaré charts and the restriction to the equator.
//! * [`dynamics`]: equilibria, Jacobians, eigenvalues, classification and integration.
//! * [`einstein`]: the direct Einstein solver and the fixed-point/metric bridge.
//! * [`poly`]: exact multivariate polynomials over the rationals.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod compactify;
pub mod curvature;
pub mod dynamics;
pub mod einstein;
mod error;
pub mod flow;
pub(crate) mod math;
pub mod poly;

pub use catalog::{ClassicalFamily, FlagSpace, StructureConstants};
pub use compactify::{Chart, ChartPoint, CompactifiedField};
pub use curvature::{InvariantMetric, RicciComponents, TripleTable};
pub use dynamics::{Classification, FixedPointRecord, Trajectory};
pub use einstein::EinsteinMetric;
pub use error::{Error, Result};
pub use poly::{Poly, PolyVectorField, Rational};
