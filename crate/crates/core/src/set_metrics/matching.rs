use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distances::PairDistance;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Pairwise distances between two collections: entry (i, j) is the distance
/// from `set_a[i]` to `set_b[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        Ok(Self { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn ensure_nonempty(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::EmptyInput("distance matrix has an empty side".into()));
        }
        Ok(())
    }

    /// Fraction of columns that are the nearest column of at least one row.
    /// Ties go to the smallest column index.
    pub fn coverage(&self) -> Result<f64> {
        self.ensure_nonempty()?;
        let matched: BTreeSet<usize> = (0..self.rows)
            .map(|i| {
                let row = &self.values[i * self.cols..(i + 1) * self.cols];
                let mut best = 0;
                for (j, &d) in row.iter().enumerate().skip(1) {
                    if d < row[best] {
                        best = j;
                    }
                }
                best
            })
            .collect();
        Ok(matched.len() as f64 / self.cols as f64)
    }

    /// Mean over columns of the smallest entry in that column.
    pub fn mmd(&self) -> Result<f64> {
        self.ensure_nonempty()?;
        let total: f64 = (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| self.get(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        Ok(total / self.cols as f64)
    }
}

fn check_sets(set_a: &[PointCloud], set_b: &[PointCloud], metric: &PairDistance) -> Result<()> {
    if set_a.is_empty() || set_b.is_empty() {
        return Err(Error::EmptyInput("point-cloud set is empty".into()));
    }
    if let PairDistance::Emd(cfg) = metric {
        cfg.validate()?;
        // one cardinality means one solver for the whole matrix
        let n = set_a[0].len();
        if let Some(pc) = set_a.iter().chain(set_b).find(|pc| pc.len() != n) {
            return Err(Error::UnequalCardinality {
                left: n,
                right: pc.len(),
            });
        }
    }
    Ok(())
}

/// All pairwise distances between `set_a` (rows) and `set_b` (columns).
/// Entries are computed in parallel; each is independent of the schedule.
pub fn distance_matrix(
    set_a: &[PointCloud],
    set_b: &[PointCloud],
    metric: &PairDistance,
) -> Result<DistanceMatrix> {
    check_sets(set_a, set_b, metric)?;
    let cols = set_b.len();
    let values = (0..set_a.len() * cols)
        .into_par_iter()
        .map(|k| metric.eval(&set_a[k / cols], &set_b[k % cols]))
        .collect::<Result<Vec<_>>>()?;
    DistanceMatrix::from_values(set_a.len(), cols, values)
}

/// Fraction of `reference_set` that is the nearest neighbor of some sample.
pub fn coverage(
    sample_set: &[PointCloud],
    reference_set: &[PointCloud],
    metric: &PairDistance,
) -> Result<f64> {
    distance_matrix(sample_set, reference_set, metric)?.coverage()
}

/// Mean, over `reference_set`, of the distance to the closest sample.
pub fn mmd(
    sample_set: &[PointCloud],
    reference_set: &[PointCloud],
    metric: &PairDistance,
) -> Result<f64> {
    distance_matrix(sample_set, reference_set, metric)?.mmd()
}
