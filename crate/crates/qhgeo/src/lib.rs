//! Numerical toolkit for the quasihyperbolic metric `k` and the distance
//! ratio metric `j` on proper subdomains of n-space.
//!
//! The crate provides:
//!
//! * exact closed-form distances where they exist (hyperbolic ball and
//!   half-space, punctured space via the Martin-Osgood formula),
//! * a general-domain numeric geodesic solver (grid Dijkstra followed by
//!   variational polyline refinement),
//! * metric-ball shape certification: convexity, starlikeness,
//!   close-to-convexity and connectivity,
//! * the critical radii kappa and lambda together with the full
//!   critical-radius tables,
//! * moduli of convexity and smoothness of 2D p-norm spaces and an
//!   evaluator for the annulus averaging estimate.

pub mod constants;
pub mod domain;
pub mod error;
pub mod field;
pub mod metric;
pub mod moduli;
pub mod norm;
pub mod path;
pub mod point;
pub mod shape;
pub mod solver;
pub mod svg;
pub mod verify;

pub use domain::DomainSpec;
pub use error::{Error, Result};
pub use metric::MetricKind;
pub use norm::NormSpec;
pub use path::PathPolyline;
pub use point::Point;
