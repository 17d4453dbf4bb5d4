use crate::error::{Error, Result};
use crate::geometry::GridSpec;

/// Occupied/empty flag per cell of a grid, x-major like [`GridSpec::linear_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryVoxelGrid {
    spec: GridSpec,
    occupancy: Vec<bool>,
}

impl BinaryVoxelGrid {
    pub fn new(spec: GridSpec, occupancy: Vec<bool>) -> Result<Self> {
        spec.validate()?;
        if occupancy.len() != spec.cell_count() {
            return Err(Error::GridMismatch(format!(
                "{} cells for a grid of {}",
                occupancy.len(),
                spec.cell_count()
            )));
        }
        Ok(Self { spec, occupancy })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn occupied(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }
}

/// Real-valued grid, e.g. decoder output probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    spec: GridSpec,
    values: Vec<f64>,
}

impl DensityGrid {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.cell_count() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {}",
                values.len(),
                spec.cell_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("density grid".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A cell is occupied iff its density is at least `threshold`.
pub fn threshold_grid(densities: &DensityGrid, threshold: f64) -> BinaryVoxelGrid {
    BinaryVoxelGrid {
        spec: densities.spec,
        occupancy: densities.values.iter().map(|&v| v >= threshold).collect(),
    }
}

/// Intersection over union of the occupied cells.
pub fn voxel_iou(a: &BinaryVoxelGrid, b: &BinaryVoxelGrid) -> Result<f64> {
    a.spec.ensure_same(&b.spec)?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.occupancy.iter().zip(&b.occupancy) {
        inter += usize::from(x && y);
        union += usize::from(x || y);
    }
    if union == 0 {
        return Err(Error::UndefinedIou);
    }
    Ok(inter as f64 / union as f64)
}
