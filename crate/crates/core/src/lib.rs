//! Confluent vessel tree reconstruction.
//!
//! Oriented centerline samples are linked by flow-extrapolating circular arcs into a
//! directed tubular graph whose arcs must agree with the flow estimate where they arrive;
//! the tree is the minimum arborescence of that graph. An undirected geodesic graph with
//! a minimum spanning tree is provided as the baseline, together with a synthetic
//! ground-truth generator and evaluation metrics.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases at the crate
//! root fix the scalar to `f64`.

pub mod error;
pub mod formats;
pub mod geometry;
pub mod graph;
pub mod metrics;
pub mod neighbors;
pub mod scalar;
pub mod solver;
pub mod spatial;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::{Real, Weight};

pub type Vec3 = geometry::Vec3<f64>;
pub type Point3 = geometry::Point3<f64>;
pub type UnitVec3 = geometry::UnitVec3<f64>;
pub type OrientedSample = geometry::OrientedSample<f64>;
pub type FlowArc = geometry::FlowArc<f64>;
pub type ConfluentGraph = graph::ConfluentGraph<f64>;
pub type GeodesicGraph = graph::GeodesicGraph<f64>;
pub type TubularGraph = graph::TubularGraph<f64>;
pub type VesselTree = solver::VesselTree<f64>;
pub type GroundTruthTree = synth::GroundTruthTree<f64>;
