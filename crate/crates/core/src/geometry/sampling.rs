use rand::Rng;

use super::{Point, PointCloud, TriangleMesh};
use crate::error::{Error, Result};

/// Draws `n` points uniformly over the surface of `mesh`.
///
/// Faces are picked with probability proportional to area; the position
/// inside a face uses the square-root barycentric construction
/// `u = 1 - sqrt(r1)`, `v = r2 * sqrt(r1)`, `w = 1 - u - v`, which is exactly
/// area-uniform.
pub fn sample_mesh<R: Rng + ?Sized>(mesh: &TriangleMesh, n: usize, rng: &mut R) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut cumulative = Vec::with_capacity(mesh.faces().len());
    let mut total = 0.0;
    for area in mesh.face_areas() {
        total += area;
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(Error::DegenerateMesh);
    }

    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let target = rng.random::<f64>() * total;
        // first face whose cumulative area exceeds the target; zero-area faces
        // share their predecessor's cumulative value and are never selected
        let face = cumulative
            .partition_point(|&c| c <= target)
            .min(cumulative.len() - 1);
        let [a, b, c] = mesh.triangle(face);
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let s = r1.sqrt();
        let u = 1.0 - s;
        let v = r2 * s;
        let w = 1.0 - u - v;
        let p: Point = std::array::from_fn(|k| u * a[k] + v * b[k] + w * c[k]);
        points.push(p);
    }
    PointCloud::new(points)
}
