use proptest::prelude::*;

use pceval_core::distances::{chamfer, emd, EmdConfig, KdTree};
use pceval_core::geometry::{distance, squared_distance};
use pceval_core::{Point, PointCloud};

fn arb_points(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(prop::array::uniform3(-1.0f64..1.0), n)
}

fn cloud(p: Vec<Point>) -> PointCloud {
    PointCloud::new(p).unwrap()
}

proptest! {
    #[test]
    fn chamfer_is_symmetric_and_order_free(a in arb_points(1..40), b in arb_points(1..40), rot in 0usize..40) {
        let (ca, cb) = (cloud(a.clone()), cloud(b));
        let d = chamfer(&ca, &cb, true);
        prop_assert!(d >= 0.0);
        prop_assert!((d - chamfer(&cb, &ca, true)).abs() <= 1e-12);
        prop_assert_eq!(chamfer(&ca, &ca, true), 0.0);
        let mut shuffled = a;
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        prop_assert!((d - chamfer(&cloud(shuffled), &cb, true)).abs() <= 1e-12);
    }

    #[test]
    fn emd_is_bounded_by_centroid_gap_and_diameter(pairs in arb_points(2..24).prop_flat_map(|a| {
        let n = a.len();
        (Just(a), arb_points(n..n + 1))
    })) {
        let (a, b) = pairs;
        let (ca, cb) = (cloud(a.clone()), cloud(b.clone()));
        let d = emd(&ca, &cb, &EmdConfig::default()).unwrap();
        // mean transport cost is at least the distance between the means
        prop_assert!(d + 1e-12 >= distance(&ca.centroid(), &cb.centroid()));
        let far = a.iter().flat_map(|p| b.iter().map(move |q| distance(p, q))).fold(0.0, f64::max);
        prop_assert!(d <= far + 1e-12);
        let mut rev = b;
        rev.reverse();
        prop_assert!((d - emd(&ca, &cloud(rev), &EmdConfig::default()).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn k_nearest_matches_sorting(pts in arb_points(1..200), q in prop::array::uniform3(-1.5f64..1.5), k in 1usize..20) {
        let tree = KdTree::build(&pts);
        let mut expect: Vec<(f64, usize)> = pts.iter().enumerate().map(|(i, p)| (squared_distance(p, &q), i)).collect();
        expect.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        expect.truncate(k);
        let got: Vec<(f64, usize)> = tree.k_nearest(&q, k).iter().map(|n| (n.squared_distance, n.index)).collect();
        prop_assert_eq!(got, expect);
        let nn = tree.nearest(&q).unwrap();
        prop_assert_eq!(nn.index, tree.k_nearest(&q, 1)[0].index);
    }
}
