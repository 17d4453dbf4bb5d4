use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::rng;

/// A "generator" that returns `size` training clouds chosen uniformly at
/// random. Without `with_replacement`, `size` may not exceed the training set.
pub fn memorization_baseline(
    train_set: &[PointCloud],
    size: usize,
    seed: u64,
    with_replacement: bool,
) -> Result<Vec<PointCloud>> {
    if train_set.is_empty() {
        return Err(Error::EmptyInput("training set is empty".into()));
    }
    if size == 0 {
        return Err(Error::InvalidArgument("baseline size must be positive".into()));
    }
    let mut rng = rng::seeded(seed);
    if with_replacement {
        return Ok((0..size)
            .map(|_| train_set[rng.random_range(0..train_set.len())].clone())
            .collect());
    }
    if size > train_set.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {size} of {} training clouds without replacement",
            train_set.len()
        )));
    }
    Ok(index::sample(&mut rng, train_set.len(), size)
        .into_iter()
        .map(|i| train_set[i].clone())
        .collect())
}
