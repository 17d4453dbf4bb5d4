use serde::{Deserialize, Serialize};

use crate::distances::nearest_neighbor_index;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompletionScore {
    /// Fraction of predicted points within `rho` of the ground truth.
    pub accuracy: f64,
    /// Fraction of ground-truth points within `rho` of the prediction.
    pub coverage: f64,
    pub rho: f64,
}

fn fraction_within(from: &PointCloud, to: &PointCloud, rho_sq: f64) -> f64 {
    let hits = nearest_neighbor_index(from, to)
        .iter()
        .filter(|n| n.squared_distance <= rho_sq)
        .count();
    hits as f64 / from.len() as f64
}

/// Accuracy and coverage of a completed cloud at radius `rho`. A point
/// exactly at distance `rho` counts as within.
pub fn completion_score(predicted: &PointCloud, ground_truth: &PointCloud, rho: f64) -> Result<CompletionScore> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument("rho must be positive".into()));
    }
    let rho_sq = rho * rho;
    Ok(CompletionScore {
        accuracy: fraction_within(predicted, ground_truth, rho_sq),
        coverage: fraction_within(ground_truth, predicted, rho_sq),
        rho,
    })
}
