//! Shape-completion scores and voxel-grid overlap.

mod completion;
mod voxel_grid;

pub use completion::{completion_score, CompletionScore};
pub use voxel_grid::{threshold_grid, voxel_iou, BinaryVoxelGrid, DensityGrid};
