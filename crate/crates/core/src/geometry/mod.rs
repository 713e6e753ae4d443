//! Points, unit tangents and flow-extrapolating circular arcs.

mod arc;
mod sample;
mod vec3;

pub use arc::{arc_end_tangent, arc_weight, cocircularity_angle, confluence_angle, fit_arc, FlowArc};
pub use sample::OrientedSample;
pub use vec3::{clamped_acos, Point3, UnitVec3, Vec3};
