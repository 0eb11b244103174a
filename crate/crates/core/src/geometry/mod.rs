//! Ball volumes, lenses, k-wise intersections and unions of balls.
//!
//! Closed forms cover single balls and pairs; one- and two-dimensional
//! unions are exact. Randomized stratified quadrature is available for every
//! dimension and serves as the reference for the exact paths.

mod ball;
mod exact;
mod intersection;
mod quadrature;
mod union;

pub use ball::{ball_volume, lens_volume, pair_intersection_volume, unit_ball_volume, Ball, Metric};
pub use exact::{disk_union_area, interval_union_length, merge_intervals, Disk, Rect};
pub use intersection::{critical_ratio, k_intersection_volume};
pub use quadrature::{integrate_box, QuadratureScheme, QuadratureSpec};
pub use union::{exact_union_minus, torus_images, union_volume, BallSet};
