use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point, PointCloud};
use crate::rng;

/// Keeps the `keep_fraction` of points with the smallest projection onto
/// `normal` (rounded, at least one point), optionally resampled to
/// `resample_to` points. Ties in projection keep the lower index.
pub fn crop_halfspace(
    pc: &PointCloud,
    normal: Point,
    keep_fraction: f64,
    resample_to: Option<usize>,
    with_replacement: bool,
    seed: u64,
) -> Result<PointCloud> {
    let len = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(len.is_finite() && len > 0.0) {
        return Err(Error::InvalidArgument("plane normal must be a nonzero finite vector".into()));
    }
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("keep fraction {keep_fraction} not in (0, 1]")));
    }
    let n = normal.map(|v| v / len);
    let proj = |p: &Point| p[0] * n[0] + p[1] * n[1] + p[2] * n[2];
    let pts = pc.points();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| proj(&pts[a]).total_cmp(&proj(&pts[b])).then(a.cmp(&b)));
    let keep = ((keep_fraction * pts.len() as f64).round() as usize).clamp(1, pts.len());
    let kept: Vec<Point> = order[..keep].iter().map(|&i| pts[i]).collect();

    let Some(m) = resample_to else {
        return PointCloud::new(kept);
    };
    if m == 0 {
        return Err(Error::InvalidArgument("resample size must be positive".into()));
    }
    let mut rng = rng::seeded(seed);
    let out = if with_replacement {
        (0..m).map(|_| kept[rng.random_range(0..kept.len())]).collect()
    } else {
        if m > kept.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot resample {m} of {} kept points without replacement",
                kept.len()
            )));
        }
        index::sample(&mut rng, kept.len(), m).into_iter().map(|i| kept[i]).collect()
    };
    PointCloud::new(out)
}
