use std::collections::HashSet;
use std::f64::consts::TAU;

use leafarch::geometry::{
    convex_hull, decimate_by_area_budget, polygon_area, polygon_perimeter, signed_area, Point2, Polygon,
};
use leafarch::raster::{connected_components, dilate, erode, opening, otsu_threshold_from_histogram, BinaryImage};
use proptest::prelude::*;

fn points() -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..120)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point2::new(x, y)).collect())
}

fn star() -> impl Strategy<Value = Polygon> {
    prop::collection::vec((0.0..TAU, 5.0..50.0f64), 3..80).prop_map(|mut v| {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v.dedup_by(|a, b| a.0 == b.0);
        let pts: Vec<Point2> = v.iter().map(|&(t, r)| Point2::new(r * t.cos(), r * t.sin())).collect();
        Polygon::new(pts).expect("star polygon")
    })
}

fn binary() -> impl Strategy<Value = BinaryImage> {
    (4usize..24, 4usize..24).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<bool>(), w * h).prop_map(move |px| BinaryImage::new(w, h, px).unwrap())
    })
}

fn subset(a: &BinaryImage, b: &BinaryImage) -> bool {
    a.pixels().iter().zip(b.pixels()).all(|(&x, &y)| !x || y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hull_encloses_input_and_is_convex(pts in points()) {
        let Ok(hull) = convex_hull(&pts) else { return Ok(()) };
        let v = hull.vertices();
        let input: HashSet<_> = pts.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
        prop_assert!(v.iter().all(|p| input.contains(&(p.x.to_bits(), p.y.to_bits()))));
        prop_assert!(signed_area(v) > 0.0);
        for (a, b) in hull.edges() {
            for &p in &pts {
                prop_assert!((b - a).cross(p - a) >= -1e-9 * (b - a).norm());
            }
        }
    }

    #[test]
    fn area_ignores_rigid_motion(p in star(), t in 0.0..TAU, dx in -1e3..1e3f64, dy in -1e3..1e3f64) {
        let moved = p.map(|q| Point2::new(q.x * t.cos() - q.y * t.sin() + dx, q.x * t.sin() + q.y * t.cos() + dy)).unwrap();
        let (a, b) = (polygon_area(&p), polygon_area(&moved));
        prop_assert!((a - b).abs() <= 1e-9 * a);
        prop_assert!((polygon_perimeter(&p) - polygon_perimeter(&moved)).abs() <= 1e-9 * polygon_perimeter(&p));
    }

    #[test]
    fn hull_area_bounds_polygon_area(p in star()) {
        let hull = convex_hull(p.vertices()).unwrap();
        prop_assert!(polygon_area(&hull) >= polygon_area(&p) * (1.0 - 1e-12));
    }

    #[test]
    fn decimation_respects_budget(p in star(), budget in 0.0..0.3f64) {
        let d = decimate_by_area_budget(&p, budget);
        let a = polygon_area(&p);
        prop_assert!(d.len() <= p.len() && d.len() >= 3);
        prop_assert!((polygon_area(&d) - a).abs() <= budget * a + 1e-9 * a);
        let orig: HashSet<_> = p.vertices().iter().map(|q| (q.x.to_bits(), q.y.to_bits())).collect();
        prop_assert!(d.vertices().iter().all(|q| orig.contains(&(q.x.to_bits(), q.y.to_bits()))));
    }

    #[test]
    fn morphology_orders_and_opening_is_idempotent(img in binary(), r in 0usize..3) {
        let d = 2 * r + 1;
        prop_assert!(subset(&erode(&img, d), &img));
        prop_assert!(subset(&img, &dilate(&img, d)));
        let o = opening(&img, d);
        prop_assert!(subset(&o, &img));
        prop_assert_eq!(opening(&o, d), o);
    }

    #[test]
    fn components_partition_foreground(img in binary()) {
        let comps = connected_components(&img);
        prop_assert_eq!(comps.iter().map(|c| c.area()).sum::<usize>(), img.count());
        prop_assert!(comps.windows(2).all(|w| w[0].area() >= w[1].area()));
        let mut seen = HashSet::new();
        for c in &comps {
            for &p in &c.pixels {
                prop_assert!(seen.insert(p));
            }
        }
    }

    #[test]
    fn otsu_lies_within_occupied_levels(h in prop::collection::vec(0u64..1000, 256)) {
        let hist: [u64; 256] = h.try_into().unwrap();
        let Some(lo) = hist.iter().position(|&c| c > 0) else { return Ok(()) };
        let hi = hist.iter().rposition(|&c| c > 0).unwrap();
        let t = otsu_threshold_from_histogram(&hist) as usize;
        prop_assert!(lo <= t && t <= hi);
        if lo < hi {
            prop_assert!(t < hi);
        }
    }
}
