//! Geometry lab for CAT(0) model spaces.
//!
//! Four concrete models — the hyperbolic plane (upper half-plane), Euclidean
//! n-space, the Cayley tree of the free group F2, and the product H2 x R —
//! behind one set of operations: distances and geodesics, comparison-triangle
//! checks, horofunctions and boundaries, convex projections, contraction
//! estimates, isometry classification, and group dynamics on the boundary.
//!
//! Float-backed models carry explicit tolerances (see [`tol`]); the tree
//! model is exact over rationals throughout.

pub mod boundary;
pub mod contracting;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod isometry;
pub mod projection;
pub mod euclid;
pub mod h2;
pub mod space;
pub mod tol;
pub mod tree;

pub use error::{Cat0Error, Result};
