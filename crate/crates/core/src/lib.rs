//! Point-cloud evaluation toolkit.
//!
//! Distances between point sets (Chamfer, Earth Mover's), set-level metrics
//! for scoring generators (JSD over voxel occupancy, minimum matching
//! distance, coverage), Gaussian mixture fitting over latent codes, and the
//! file formats and protocol drivers that tie them together.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aux_metrics;
pub mod distances;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod latent_models;
pub mod rng;
pub mod set_metrics;

pub use error::{Error, Result};
pub use geometry::{GridSpec, OccupancyHistogram, Point, PointCloud, TriangleMesh};
