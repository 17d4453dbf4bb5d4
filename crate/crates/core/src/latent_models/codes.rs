use crate::error::{Error, Result};

/// Row-major matrix of latent codes: `rows` samples of `dims` values each.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentCodeSet {
    rows: usize,
    dims: usize,
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl LatentCodeSet {
    pub fn new(rows: usize, dims: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || dims == 0 {
            return Err(Error::EmptyInput("latent code set needs at least one row and one dimension".into()));
        }
        if values.len() != rows * dims {
            return Err(Error::DimensionMismatch {
                expected: rows * dims,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("latent codes".into()));
        }
        Ok(Self {
            rows,
            dims,
            values,
            labels: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dims = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dims) {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), dims, rows.concat())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dims..(i + 1) * self.dims]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dims)
    }

    /// Subset of rows, in the order given.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.rows) {
            return Err(Error::InvalidArgument(format!(
                "row {bad} out of range for {} rows",
                self.rows
            )));
        }
        let values = indices.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        let mut out = Self::new(indices.len(), self.dims, values)?;
        if let Some(labels) = &self.labels {
            out.labels = Some(indices.iter().map(|&i| labels[i].clone()).collect());
        }
        Ok(out)
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = self.sum();
        for v in &mut m {
            *v /= self.rows as f64;
        }
        m
    }

    pub fn sum(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dims];
        for row in self.iter_rows() {
            for (acc, v) in s.iter_mut().zip(row) {
                *acc += v;
            }
        }
        s
    }
}
