mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use roofgraph::geom::{
    angular_distance, bin_center, bin_direction, rasterize_segment, segment_hits_ray, segments_properly_intersect,
    trace_boundary, BitMask, Canvas, Point2, Ray, Segment2, BIN_WIDTH_DEG, NUM_BINS,
};

use common::{orient, point_segment_distance};

fn grid_point() -> impl Strategy<Value = Point2> {
    (0i32..7, 0i32..7).prop_map(|(x, y)| Point2::new(x as f64, y as f64))
}

fn grid_segment() -> impl Strategy<Value = Segment2> {
    (grid_point(), grid_point()).prop_filter("non-degenerate", |(a, b)| a != b).prop_map(|(a, b)| Segment2::new(a, b))
}

fn real_segment(lim: f64) -> impl Strategy<Value = Segment2> {
    (0.0..lim, 0.0..lim, 0.0..lim, 0.0..lim)
        .prop_map(|(ax, ay, bx, by)| Segment2::new(Point2::new(ax, ay), Point2::new(bx, by)))
        .prop_filter("length >= 1", |s| s.length() >= 1.0)
}

/// Independent predicate on integer-grid segments.
fn oracle_intersect(s: &Segment2, t: &Segment2) -> bool {
    let on = |a: Point2, b: Point2, p: Point2| {
        orient(a, b, p) == 0 && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
    };
    let (o1, o2) = (orient(s.a, s.b, t.a), orient(s.a, s.b, t.b));
    let (o3, o4) = (orient(t.a, t.b, s.a), orient(t.a, t.b, s.b));
    if o1 == 0 && o2 == 0 {
        // Collinear: overlap length along the shared line.
        let d = s.b - s.a;
        let proj = |p: Point2| (p - s.a).dot(d) / d.dot(d);
        let (lo, hi) = (proj(t.a).min(proj(t.b)), proj(t.a).max(proj(t.b)));
        return hi.min(1.0) - lo.max(0.0) > 1e-12;
    }
    let shared = [s.a, s.b].iter().filter(|p| **p == t.a || **p == t.b).count();
    let touching = (o1 * o2 <= 0 && o3 * o4 <= 0)
        || on(s.a, s.b, t.a)
        || on(s.a, s.b, t.b)
        || on(t.a, t.b, s.a)
        || on(t.a, t.b, s.b);
    touching && shared == 0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn proper_intersection_is_symmetric(s in real_segment(20.0), t in real_segment(20.0)) {
        prop_assert_eq!(segments_properly_intersect(&s, &t), segments_properly_intersect(&t, &s));
        prop_assert_eq!(segments_properly_intersect(&s, &t), segments_properly_intersect(&t.reversed(), &s.reversed()));
    }

    #[test]
    fn proper_intersection_matches_grid_oracle(s in grid_segment(), t in grid_segment()) {
        prop_assert_eq!(segments_properly_intersect(&s, &t), oracle_intersect(&s, &t), "{:?} {:?}", s, t);
    }

    #[test]
    fn shared_endpoint_only_counts_when_collinear_overlap(a in grid_point(), b in grid_point(), c in grid_point()) {
        prop_assume!(a != b && a != c && b != c);
        let (s, t) = (Segment2::new(a, b), Segment2::new(a, c));
        let overlap = orient(a, b, c) == 0 && (b - a).dot(c - a) > 0.0;
        prop_assert_eq!(segments_properly_intersect(&s, &t), overlap);
    }

    #[test]
    fn rasterization_matches_distance_scan(s in real_segment(64.0), w in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        let canvas = Canvas::new(64, 64);
        let got: BTreeSet<(usize, usize)> = rasterize_segment(&s, w, canvas).into_iter().collect();
        let mut want = BTreeSet::new();
        for y in 0..64 {
            for x in 0..64 {
                if point_segment_distance(Point2::new(x as f64, y as f64), s.a, s.b) <= w / 2.0 {
                    want.insert((x, y));
                }
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn ray_hits_when_segment_enters_rectangle(s in real_segment(40.0), ox in 5.0..35.0, oy in 5.0..35.0, ang in 0.0..360.0f64) {
        let dir = Point2::new(ang.to_radians().cos(), ang.to_radians().sin());
        let ray = Ray::new(Point2::new(ox, oy), dir, 15.0, 2.0);
        let normal = Point2::new(-dir.y, dir.x);
        let inside = (0..=400).any(|k| {
            let t = k as f64 / 400.0;
            let p = s.a + (s.b - s.a) * t;
            let along = (p - ray.origin).dot(dir);
            let across = (p - ray.origin).dot(normal).abs();
            (0.0..=15.0).contains(&along) && across <= 1.0
        });
        if inside {
            prop_assert!(segment_hits_ray(&s, &ray));
        }
        // Far outside the rectangle's bounding circle can never hit.
        let far = (0..=50).all(|k| {
            let p = s.a + (s.b - s.a) * (k as f64 / 50.0);
            (p - (ray.origin + dir * 7.5)).norm() > 7.6 + 1.0 + s.length() / 50.0
        });
        if far {
            prop_assert!(!segment_hits_ray(&s, &ray));
        }
    }

    #[test]
    fn angular_distance_range(a in -720.0..720.0f64, b in -720.0..720.0f64) {
        let d = angular_distance(a, b);
        prop_assert!((0.0..=180.0).contains(&d));
        prop_assert!((d - angular_distance(b, a)).abs() < 1e-9);
        prop_assert!((angular_distance(a, a + 180.0) - 180.0).abs() < 1e-9);
    }

    #[test]
    fn bins_partition_the_circle(theta in 0.0..360.0f64) {
        let b = bin_direction(theta);
        prop_assert!(b < NUM_BINS);
        prop_assert_eq!(b, (theta / 24.0).floor() as usize);
        prop_assert!(theta >= 24.0 * b as f64 && theta < 24.0 * (b + 1) as f64);
        prop_assert!(angular_distance(theta, bin_center(b)) <= BIN_WIDTH_DEG / 2.0 + 1e-9);
    }

    #[test]
    fn boundary_is_closed_cycle(rects in prop::collection::vec((0usize..20, 0usize..20, 1usize..8, 1usize..8), 1..4)) {
        let mut m = BitMask::new(32, 32);
        for (x, y, w, h) in rects {
            for yy in y..(y + h).min(32) {
                for xx in x..(x + w).min(32) {
                    m.set(xx, yy, true);
                }
            }
        }
        let b = trace_boundary(&m).unwrap();
        let comp = m.largest_component();
        for p in &b {
            prop_assert!(comp.get(p.x as usize, p.y as usize));
        }
        if b.len() > 1 {
            for k in 0..b.len() {
                let (p, q) = (b[k], b[(k + 1) % b.len()]);
                prop_assert!((p.x - q.x).abs() <= 1.0 && (p.y - q.y).abs() <= 1.0, "{:?} -> {:?}", p, q);
            }
        }
    }

    #[test]
    fn rle_round_trip(bits in prop::collection::vec(any::<bool>(), 13 * 7)) {
        let px: Vec<(usize, usize)> = bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| (i % 13, i / 13)).collect();
        let m = BitMask::from_pixels(13, 7, &px);
        let rle = m.to_rle();
        for row in &rle {
            prop_assert_eq!(row.iter().sum::<u32>(), 13);
        }
        prop_assert_eq!(BitMask::from_rle(13, 7, &rle).unwrap(), m);
    }
}
