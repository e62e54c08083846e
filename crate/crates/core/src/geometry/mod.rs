//! Convex bodies of the model: the rotation, boat-shaped bodies built from
//! ellipse profiles, ice-cream cones and the associated boundary functions.

mod boat;
mod cone;
mod point;
mod profile;
mod rotation;

pub use boat::{f_basic, grad_f_basic, patch_gradient, BoatSet, MEMBERSHIP_TOL, MIN_GRADIENT_HEIGHT};
pub use cone::IceCreamCone;
pub use point::{point_segment_distance, Point3};
pub use profile::{BoatProfile, EllipsePatch, Interval};
pub use rotation::Rotation;
