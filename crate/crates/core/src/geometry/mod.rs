//! Convex compacts in `R^d` represented through their support functions.

mod grid;
mod hull2d;
mod support;

pub use grid::{make_direction_grid, Direction, DirectionGrid, GridKind, UNIT_TOLERANCE};
pub use hull2d::{area2d, diameter2d, monotone_chain, Hull2d, Point2};
pub use support::{
    ellipsoid_support, hausdorff_intervals, hausdorff_profiles, profile_of_points, Ellipsoid,
    Interval, Polytope, SupportProfile, Target,
};
