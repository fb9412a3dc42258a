//! Curve reconstruction from unordered samples that carry unoriented
//! tangents.
//!
//! Given points sampled from a family of planar curves of bounded curvature,
//! each with the tangent direction of its curve, the library recovers which
//! samples are neighbors along the same curve. Tangents let it tell apart
//! curves that are much closer to each other than the sample spacing.

pub mod bench;
pub mod cli;
pub mod denoise;
pub mod error;
pub mod geom;
pub mod graph;
pub mod io;
pub mod render;
pub mod spatial;
pub mod synth;

pub use error::{Error, Result};
pub use geom::{TangentSample, UnorientedTangent, Vec2, ZoneParams};
pub use graph::{Mode, PolyGraph};
