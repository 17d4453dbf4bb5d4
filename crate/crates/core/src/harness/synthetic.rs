//! Parametric chair-like shapes for tests and demos.

use rand::Rng;

use crate::error::Result;
use crate::geometry::{normalize_unit_sphere, sample_mesh, Point, PointCloud, TriangleMesh};
use crate::rng;

/// Axis-aligned box between `lo` and `hi` as 12 outward-facing triangles,
/// appended to `vertices`/`faces`.
fn push_box(vertices: &mut Vec<Point>, faces: &mut Vec<[usize; 3]>, lo: Point, hi: Point) {
    let base = vertices.len();
    for i in 0..8 {
        vertices.push([
            if i & 1 == 0 { lo[0] } else { hi[0] },
            if i & 2 == 0 { lo[1] } else { hi[1] },
            if i & 4 == 0 { lo[2] } else { hi[2] },
        ]);
    }
    const QUADS: [[usize; 4]; 6] = [
        [0, 2, 3, 1],
        [4, 5, 7, 6],
        [0, 1, 5, 4],
        [2, 6, 7, 3],
        [0, 4, 6, 2],
        [1, 3, 7, 5],
    ];
    for q in QUADS {
        faces.push([base + q[0], base + q[1], base + q[2]]);
        faces.push([base + q[0], base + q[2], base + q[3]]);
    }
}

/// Seat, back and four legs with randomized proportions. Up is +z.
pub fn chair_mesh<R: Rng + ?Sized>(rng: &mut R) -> TriangleMesh {
    let w = rng.random_range(0.8..1.2);
    let d = rng.random_range(0.8..1.2);
    let h = rng.random_range(0.7..1.1);
    let back = rng.random_range(0.6..1.2);
    let seat = rng.random_range(0.06..0.14);
    let leg = rng.random_range(0.05..0.12);
    let (hw, hd) = (w / 2.0, d / 2.0);

    let mut v = Vec::new();
    let mut f = Vec::new();
    push_box(&mut v, &mut f, [-hw, -hd, h], [hw, hd, h + seat]);
    push_box(&mut v, &mut f, [-hw, hd - seat, h + seat], [hw, hd, h + seat + back]);
    for (sx, sy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
        let x = if sx < 0.0 { -hw } else { hw - leg };
        let y = if sy < 0.0 { -hd } else { hd - leg };
        push_box(&mut v, &mut f, [x, y, 0.0], [x + leg, y + leg, h]);
    }
    TriangleMesh::new(v, f).expect("boxes have positive area")
}

/// `count` chairs, each sampled with `points` surface points and normalized
/// into the unit sphere. Chair `i` uses stream `i` of `seed`.
pub fn chair_clouds(count: usize, points: usize, seed: u64) -> Result<Vec<PointCloud>> {
    (0..count)
        .map(|i| {
            let mut rng = rng::derive(seed, i as u64);
            let mesh = chair_mesh(&mut rng);
            Ok(normalize_unit_sphere(&sample_mesh(&mesh, points, &mut rng)?))
        })
        .collect()
}
