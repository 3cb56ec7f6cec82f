//! Exact dual-space geometry: rational scalars, dual points, Minkowski
//! operations, upper convex hulls and their normal fans.

pub mod dual;
pub mod fan;
pub mod hull;
pub(crate) mod hull3;
pub mod predicates;
pub mod scalar;
