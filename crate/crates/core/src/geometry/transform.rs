use super::PointCloud;

/// Centers the cloud at its centroid and scales it so the farthest point
/// sits on the unit sphere. A cloud of one repeated point maps to the origin.
pub fn normalize_unit_sphere(pc: &PointCloud) -> PointCloud {
    let c = pc.centroid();
    let centered = pc.map_points(|p| [p[0] - c[0], p[1] - c[1], p[2] - c[2]]);
    let radius = centered
        .points()
        .iter()
        .map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
        .fold(0.0, f64::max);
    if radius == 0.0 {
        return centered.map_points(|_| [0.0; 3]);
    }
    centered.map_points(|p| p.map(|v| v / radius))
}

/// Rotation about the z (gravity) axis by `angle` radians.
pub fn rotate_z(pc: &PointCloud, angle: f64) -> PointCloud {
    let (s, c) = angle.sin_cos();
    pc.map_points(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]])
}
