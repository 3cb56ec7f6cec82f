//! Exact decision-boundary complexity for ReLU networks.
//!
//! A ReLU network is a difference of two convex piecewise-affine functions.
//! In the dual space, where the affine function `x ↦ aᵀx + b` is the point
//! `(a, b)`, each convex part is the vertex set of an upper convex hull, and
//! a layer of the network is a Minkowski-algebra expression over such sets.
//! This crate propagates that representation through a network exactly
//! (arbitrary-precision rationals end to end), then reads off
//!
//! * the number of linear pieces of the decision boundary, as the mixed
//!   edges of `U(P ∪ N)`,
//! * the total number of affine pieces, as the vertices of `U(P ⊕ N)`,
//!
//! and verifies both against an independent activation-pattern oracle. A
//! small training lab reproduces the 2D experiments relating boundary
//! complexity to robust training.

pub mod counts;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod oracle;
pub mod train;
pub mod tropical;

pub use error::{Error, Result};
pub use geometry::dual::{
    eval_max, minkowski_matrix_product, minkowski_sum, scalar_mul, union, DualPoint, Matrix,
    PointSet, PointSetVector,
};
pub use geometry::fan::Fan;
pub use geometry::hull::{upper_hull, upper_hull_vertices, HullCell, HullComplex};
pub use geometry::scalar::{
    format_scalar, parse_scalar, scalar_from_f64, scalar_int, scalar_ratio, scalar_to_f64, Scalar,
};
