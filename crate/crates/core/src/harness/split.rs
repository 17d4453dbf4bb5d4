use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl DatasetSplit {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train.len(), self.validation.len(), self.test.len())
    }
}

/// Seeded shuffle of `0..n`, then a contiguous partition whose boundaries are
/// `floor(cumulative_ratio * n)`.
pub fn split_dataset(n: usize, ratios: [f64; 3], seed: u64) -> Result<DatasetSplit> {
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidArgument("split ratios must be positive".into()));
    }
    let total: f64 = ratios.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!("split ratios sum to {total}, not 1")));
    }
    let b1 = ((ratios[0] * n as f64) + 1e-9).floor() as usize;
    let b2 = (((ratios[0] + ratios[1]) * n as f64) + 1e-9).floor() as usize;
    let b2 = b2.min(n);
    if n < 3 || b1 == 0 || b2 <= b1 || b2 >= n {
        return Err(Error::InvalidArgument(format!(
            "{n} items cannot be split into three nonempty parts with ratios {ratios:?}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::seeded(seed));
    Ok(DatasetSplit {
        train: idx[..b1].to_vec(),
        validation: idx[b1..b2].to_vec(),
        test: idx[b2..].to_vec(),
        seed,
    })
}
