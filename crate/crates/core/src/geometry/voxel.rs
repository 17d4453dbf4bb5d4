use serde::{Deserialize, Serialize};

use super::{Point, PointCloud};
use crate::error::{Error, Result};

/// Regular grid over an axis-aligned cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
    pub center: Point,
    pub half_width: f64,
}

impl Default for GridSpec {
    /// 28 cells per axis over [-1, 1]^3.
    fn default() -> Self {
        Self {
            resolution: 28,
            center: [0.0; 3],
            half_width: 1.0,
        }
    }
}

impl GridSpec {
    pub fn new(resolution: usize, center: Point, half_width: f64) -> Result<Self> {
        let spec = Self {
            resolution,
            center,
            half_width,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_resolution(resolution: usize) -> Result<Self> {
        Self::new(resolution, [0.0; 3], 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(Error::InvalidArgument("grid resolution must be at least 1".into()));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidArgument("grid half-width must be positive".into()));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("grid center".into()));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.resolution.pow(3)
    }

    /// Linear index of cell (ix, iy, iz); x varies slowest.
    #[inline]
    pub fn linear_index(&self, cell: [usize; 3]) -> usize {
        (cell[0] * self.resolution + cell[1]) * self.resolution + cell[2]
    }

    /// Cell holding `p`, and whether `p` had to be clamped into the grid.
    /// Points on an interior face go to the cell with the larger index.
    pub fn cell_of(&self, p: &Point) -> ([usize; 3], bool) {
        let res = self.resolution as f64;
        let width = 2.0 * self.half_width;
        let mut clamped = false;
        let cell = std::array::from_fn(|a| {
            let lo = self.center[a] - self.half_width;
            let hi = self.center[a] + self.half_width;
            if p[a] < lo || p[a] > hi {
                clamped = true;
            }
            let t = ((p[a] - lo) * res / width).floor();
            if t < 0.0 {
                0
            } else {
                (t as usize).min(self.resolution - 1)
            }
        });
        (cell, clamped)
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "resolution {} / half-width {} / center {:?} vs resolution {} / half-width {} / center {:?}",
                self.resolution,
                self.half_width,
                self.center,
                other.resolution,
                other.half_width,
                other.center
            )));
        }
        Ok(())
    }
}

/// Per-cell point counts accumulated over a collection of clouds.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyHistogram {
    spec: GridSpec,
    counts: Vec<u64>,
    clamped: u64,
}

impl OccupancyHistogram {
    pub fn from_counts(spec: GridSpec, counts: Vec<u64>) -> Result<Self> {
        spec.validate()?;
        if counts.len() != spec.cell_count() {
            return Err(Error::GridMismatch(format!(
                "{} counts for a grid of {} cells",
                counts.len(),
                spec.cell_count()
            )));
        }
        Ok(Self {
            spec,
            counts,
            clamped: 0,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Points that fell outside the grid extent and were counted in the
    /// nearest boundary cell.
    pub fn clamped(&self) -> u64 {
        self.clamped
    }
}

/// Counts every point of every cloud into `spec`'s cells.
pub fn voxelize(set: &[PointCloud], spec: &GridSpec) -> Result<OccupancyHistogram> {
    spec.validate()?;
    if set.is_empty() {
        return Err(Error::EmptyInput("no point clouds to voxelize".into()));
    }
    let mut counts = vec![0u64; spec.cell_count()];
    let mut clamped = 0u64;
    for p in set.iter().flat_map(|pc| pc.points()) {
        let (cell, was_clamped) = spec.cell_of(p);
        counts[spec.linear_index(cell)] += 1;
        clamped += u64::from(was_clamped);
    }
    Ok(OccupancyHistogram {
        spec: *spec,
        counts,
        clamped,
    })
}
