//! Exact geometric kernel: rationals, sums of square roots, points, spheres and planar polygons.

pub mod frame;
pub mod point;
pub mod polygon;
pub mod radical;
pub mod rational;
pub mod sphere;

pub use point::{moment_point, Point};
pub use polygon::{on_segment, orientation, point_vs_polygon, polyline_is_simple, segments_intersect};
pub use radical::{compare_radical_sums, RadicalSum, DEFAULT_PRECISION_CAP};
pub use rational::{parse_rational, rat, ratio, Rational};
pub use sphere::{circumsphere, moment_curve_polynomial, sphere_side, Side, Sphere};
