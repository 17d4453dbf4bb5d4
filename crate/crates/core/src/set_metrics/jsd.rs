use crate::error::{Error, Result};
use crate::geometry::{voxelize, GridSpec, OccupancyHistogram, PointCloud};

/// Jensen-Shannon divergence (natural log) between the normalized occupancy
/// distributions of two histograms on the same grid. Bounded by ln 2.
pub fn jsd(h_a: &OccupancyHistogram, h_b: &OccupancyHistogram) -> Result<f64> {
    h_a.spec().ensure_same(h_b.spec())?;
    let total_a = h_a.total();
    let total_b = h_b.total();
    if total_a == 0 || total_b == 0 {
        return Err(Error::EmptyInput("histogram has zero total count".into()));
    }
    let (ta, tb) = (total_a as f64, total_b as f64);
    let mut kl_a = 0.0;
    let mut kl_b = 0.0;
    for (&ca, &cb) in h_a.counts().iter().zip(h_b.counts()) {
        if ca == 0 && cb == 0 {
            continue;
        }
        let pa = ca as f64 / ta;
        let pb = cb as f64 / tb;
        let m = 0.5 * (pa + pb);
        if ca > 0 {
            kl_a += pa * (pa / m).ln();
        }
        if cb > 0 {
            kl_b += pb * (pb / m).ln();
        }
    }
    Ok((0.5 * kl_a + 0.5 * kl_b).max(0.0))
}

/// Voxelizes both collections on `grid` and returns their JSD.
pub fn jsd_of_sets(set_a: &[PointCloud], set_b: &[PointCloud], grid: &GridSpec) -> Result<f64> {
    jsd(&voxelize(set_a, grid)?, &voxelize(set_b, grid)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn hist(res: usize, counts: Vec<u64>) -> OccupancyHistogram {
        OccupancyHistogram::from_counts(GridSpec::with_resolution(res).unwrap(), counts).unwrap()
    }

    #[test]
    fn identical_histograms() {
        let h = hist(2, vec![3, 0, 1, 7, 0, 0, 2, 9]);
        assert_eq!(jsd(&h, &h).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_supports_reach_ln2() {
        let a = hist(2, vec![3, 0, 1, 0, 0, 0, 2, 0]);
        let b = hist(2, vec![0, 5, 0, 7, 0, 1, 0, 0]);
        assert!((jsd(&a, &b).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn two_cell_hand_value() {
        // P_A = (1, 0), P_B = (1/2, 1/2); cells beyond the first two are empty
        let mut ca = vec![0u64; 8];
        let mut cb = vec![0u64; 8];
        ca[0] = 2;
        cb[0] = 1;
        cb[1] = 1;
        let expected = 0.5 * (4.0f64 / 3.0).ln() + 0.5 * (0.5 * (2.0f64 / 3.0).ln() + 0.5 * 2.0f64.ln());
        let got = jsd(&hist(2, ca), &hist(2, cb)).unwrap();
        assert!((got - 0.215761).abs() < 1e-6);
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let a = hist(2, vec![1; 8]);
        let b = hist(1, vec![1]);
        assert!(matches!(jsd(&a, &b), Err(Error::GridMismatch(_))));
        let z = hist(2, vec![0; 8]);
        assert!(matches!(jsd(&a, &z), Err(Error::EmptyInput(_))));
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(
            a in prop::collection::vec(0u64..20, 27),
            b in prop::collection::vec(0u64..20, 27),
        ) {
            prop_assume!(a.iter().sum::<u64>() > 0 && b.iter().sum::<u64>() > 0);
            let ha = hist(3, a);
            let hb = hist(3, b);
            let ab = jsd(&ha, &hb).unwrap();
            prop_assert_eq!(ab, jsd(&hb, &ha).unwrap());
            prop_assert!((0.0..=LN_2 + 1e-12).contains(&ab));
        }
    }
}
