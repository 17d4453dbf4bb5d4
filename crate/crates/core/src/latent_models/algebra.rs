//! Vector arithmetic on latent codes: interpolation, attribute edits and
//! shape analogies.

use serde::{Deserialize, Serialize};

use super::LatentCodeSet;
use crate::error::{Error, Result};

fn same_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `(1 - t) * a + t * b`. Exact at both endpoints.
pub fn interpolate(a: &[f64], b: &[f64], t: f64) -> Result<Vec<f64>> {
    same_dims(a, b)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("interpolation parameter".into()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect())
}

/// How a group of codes is reduced before taking the attribute difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupReduction {
    #[default]
    Mean,
    /// Plain sum over the group; differs from `Mean` when group sizes differ.
    Sum,
}

/// Direction from group A to group B: `reduce(group_b) - reduce(group_a)`.
pub fn attribute_vector(
    group_a: &LatentCodeSet,
    group_b: &LatentCodeSet,
    reduction: GroupReduction,
) -> Result<Vec<f64>> {
    if group_a.dims() != group_b.dims() {
        return Err(Error::DimensionMismatch {
            expected: group_a.dims(),
            found: group_b.dims(),
        });
    }
    let (ra, rb) = match reduction {
        GroupReduction::Mean => (group_a.mean(), group_b.mean()),
        GroupReduction::Sum => (group_a.sum(), group_b.sum()),
    };
    Ok(rb.iter().zip(&ra).map(|(b, a)| b - a).collect())
}

pub fn apply_edit(code: &[f64], edit: &[f64]) -> Result<Vec<f64>> {
    same_dims(code, edit)?;
    Ok(code.iter().zip(edit).map(|(c, e)| c + e).collect())
}

/// Completes "a is to a' as b is to ?" by moving `b` along `a' - a` and
/// returning the nearest codebook row (ties to the smallest index).
pub fn analogy(a: &[f64], a_prime: &[f64], b: &[f64], codebook: &LatentCodeSet) -> Result<(usize, Vec<f64>)> {
    same_dims(a, a_prime)?;
    same_dims(a, b)?;
    if codebook.dims() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: codebook.dims(),
        });
    }
    let target: Vec<f64> = b
        .iter()
        .zip(a_prime.iter().zip(a))
        .map(|(b, (ap, a))| b + (ap - a))
        .collect();
    let mut best = (0, f64::INFINITY);
    for (i, row) in codebook.iter_rows().enumerate() {
        let d: f64 = row.iter().zip(&target).map(|(r, t)| (r - t) * (r - t)).sum();
        if d < best.1 {
            best = (i, d);
        }
    }
    Ok((best.0, codebook.row(best.0).to_vec()))
}
