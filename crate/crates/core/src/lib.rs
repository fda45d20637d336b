//! Finite-scale island counting for discretized holomorphic curves in C².
//!
//! The pipeline projects a triangulated curve to a complex line, paves the
//! square `[-1, 1]²` with a `2k × 2k` grid and plus-shaped crosses, counts
//! the components of the curve over each region, and assembles the
//! good islands (unramified graphs over grid cells) into a laminated
//! current approximation whose missing mass is the laminarity defect.

pub mod config;
pub mod counting;
pub mod current;
pub mod cut;
pub mod error;
pub mod fibers;
pub mod forge;
pub mod mesh;
pub mod paving;
pub mod runner;
pub mod trim;
pub mod unionfind;

pub use error::{Error, Result};
pub use mesh::{CurveStats, DiscreteCurve, Point};
