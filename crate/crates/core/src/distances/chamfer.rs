use rayon::prelude::*;

use super::kdtree::{KdTree, Neighbor};
use crate::geometry::PointCloud;

/// For each query point, the index of its nearest reference point and the
/// squared distance to it. Ties go to the smallest reference index.
pub fn nearest_neighbor_index(query: &PointCloud, reference: &PointCloud) -> Vec<Neighbor> {
    let tree = KdTree::build(reference.points());
    query
        .points()
        .par_iter()
        .map(|q| tree.nearest(q).expect("reference cloud is nonempty"))
        .collect()
}

fn directed_sum(from: &PointCloud, to: &PointCloud) -> f64 {
    // ordered reduction keeps the sum independent of the thread schedule
    nearest_neighbor_index(from, to)
        .iter()
        .map(|n| n.squared_distance)
        .sum()
}

/// Chamfer distance: the sum, in both directions, of squared distances to
/// the nearest neighbor in the other cloud. With `normalize` each directed
/// sum is divided by the size of the cloud it runs over.
pub fn chamfer(s1: &PointCloud, s2: &PointCloud, normalize: bool) -> f64 {
    let mut forward = directed_sum(s1, s2);
    let mut backward = directed_sum(s2, s1);
    if normalize {
        forward /= s1.len() as f64;
        backward /= s2.len() as f64;
    }
    forward + backward
}
