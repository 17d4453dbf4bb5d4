use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};

use crate::distances::KdTree;
use crate::error::{Error, Result};
use crate::geometry::{squared_distance, Point, PointCloud};
use crate::rng;

const DENSITY_NEIGHBORS: usize = 32;

/// Index of the point with the smallest mean distance to its nearest
/// neighbors (up to 32, excluding itself). Ties go to the lower index.
pub fn densest_point(pc: &PointCloud) -> usize {
    let tree = KdTree::build(pc.points());
    let k = DENSITY_NEIGHBORS.min(pc.len() - 1);
    if k == 0 {
        return 0;
    }
    let mut best = (0, f64::INFINITY);
    for (i, p) in pc.points().iter().enumerate() {
        let nb = tree.k_nearest(p, k + 1);
        let sum: f64 = nb.iter().filter(|n| n.index != i).take(k).map(|n| n.squared_distance.sqrt()).sum();
        let mean = sum / k as f64;
        if mean < best.1 {
            best = (i, mean);
        }
    }
    best.0
}

/// Greedy seeded thinning: visits the points in shuffled order and keeps each
/// one that is at least `spacing` from every point kept so far, up to `limit`.
fn thin(points: &[Point], spacing: f64, limit: usize, rng: &mut impl rand::Rng) -> Vec<Point> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(rng);
    let cell = |p: &Point| p.map(|v| (v / spacing).floor() as i64);
    let mut grid: HashMap<[i64; 3], Vec<Point>> = HashMap::new();
    let mut kept = Vec::new();
    let s2 = spacing * spacing;
    for i in order {
        if kept.len() == limit {
            break;
        }
        let p = points[i];
        let c = cell(&p);
        let clear = (-1..=1).all(|dx| {
            (-1..=1).all(|dy| {
                (-1..=1).all(|dz| {
                    grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz])
                        .is_none_or(|v| v.iter().all(|q| squared_distance(&p, q) >= s2))
                })
            })
        });
        if clear {
            grid.entry(c).or_default().push(p);
            kept.push(p);
        }
    }
    kept
}

/// A cloud of the same size as `reference` that piles `hot_fraction` of its
/// points (jittered with scale `spread / 10`) onto the densest region and
/// covers the rest of the shape sparsely, with mutual spacing of at least
/// `spread`.
///
/// The sparse part is a thinning of the reference's own points, so it lies on
/// the shape and inside its bounding box. If the shape cannot hold enough
/// points at that spacing, the shortfall goes to the hot cluster.
pub fn hedging_fixture(reference: &PointCloud, hot_fraction: f64, spread: f64, seed: u64) -> Result<PointCloud> {
    if !(hot_fraction > 0.0 && hot_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("hot fraction {hot_fraction} not in (0, 1)")));
    }
    if !(spread.is_finite() && spread > 0.0) {
        return Err(Error::InvalidArgument("spread must be positive".into()));
    }
    let n = reference.len();
    let mut rng = rng::seeded(seed);
    let n_sparse = n - ((hot_fraction * n as f64).round() as usize).min(n);
    let mut sparse = thin(reference.points(), spread, n_sparse, &mut rng);
    let center = reference.points()[densest_point(reference)];
    let jitter = Normal::new(0.0, spread / 10.0).expect("positive scale");
    let mut points: Vec<Point> = (0..n - sparse.len())
        .map(|_| std::array::from_fn(|k| center[k] + jitter.sample(&mut rng)))
        .collect();
    points.append(&mut sparse);
    PointCloud::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn cube_surface(n: usize, seed: u64) -> PointCloud {
        let mut rng = rng::seeded(seed);
        PointCloud::new(
            (0..n)
                .map(|_| {
                    let mut p: Point = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
                    let axis = rng.random_range(0..3);
                    p[axis] = if rng.random::<bool>() { 0.5 } else { -0.5 };
                    p
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn shape_and_spacing() {
        let r = cube_surface(1024, 1);
        let f = hedging_fixture(&r, 0.6, 0.05, 3).unwrap();
        assert_eq!(f.len(), 1024);
        assert_eq!(f, hedging_fixture(&r, 0.6, 0.05, 3).unwrap());
        let n_hot = 1024 - 410;
        let sparse = &f.points()[n_hot..];
        for (i, p) in sparse.iter().enumerate() {
            assert!(r.points().contains(p));
            for q in &sparse[i + 1..] {
                assert!(squared_distance(p, q) >= 0.05 * 0.05);
            }
        }
        let c = r.points()[densest_point(&r)];
        let far = f.points()[..n_hot].iter().filter(|p| squared_distance(p, &c) > 0.005 * 0.005 * 25.0).count();
        assert!(far < 5, "{far}");
    }

    #[test]
    fn shortfall_goes_to_hot_cluster() {
        let r = cube_surface(200, 2);
        // at this spacing only a handful of points fit
        let f = hedging_fixture(&r, 0.1, 0.9, 0).unwrap();
        assert_eq!(f.len(), 200);
        let c = r.points()[densest_point(&r)];
        let hot = f.points().iter().filter(|p| squared_distance(p, &c) < 0.09 * 0.09 * 25.0).count();
        assert!(hot > 150);
    }

    #[test]
    fn rejects_bad_fraction() {
        let r = cube_surface(50, 3);
        assert!(hedging_fixture(&r, 0.0, 0.1, 0).is_err());
        assert!(hedging_fixture(&r, 1.0, 0.1, 0).is_err());
        assert!(hedging_fixture(&r, 0.5, 0.0, 0).is_err());
    }
}
