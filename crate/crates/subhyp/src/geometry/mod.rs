//! Domain representation, distance and visibility queries, and the built-in
//! test-domain gallery. All distances are measured in the uniform (sup) norm.

mod domain;
pub mod gallery;
mod primitives;

pub use domain::{BoundarySegment, Domain, DomainKind, DomainSpec, FaceTag, SegKind, Side};
pub use primitives::{
    convex_hull, cross, point_in_convex, seg_seg_intersection, Cube, Point, Rect,
    SegSegIntersection, Segment,
};

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_square_distances() {
        let d = gallery::unit_square();
        assert_abs_diff_eq!(d.dist_to_boundary(Point::new(0.5, 0.5)).unwrap(), 0.5);
        assert_abs_diff_eq!(d.dist_to_boundary(Point::new(0.25, 0.5)).unwrap(), 0.25);
        assert!(d.dist_to_boundary(Point::new(1.5, 0.5)).is_err());
    }

    #[test]
    fn slit_square_distance_brute_force() {
        let d = gallery::slit_square();
        let p = Point::new(0.0, 0.1);
        // independent oracle: minimum over all boundary segments
        let brute = d
            .segments()
            .iter()
            .map(|bs| bs.seg.sup_dist_point(p).0)
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(brute, 0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(d.dist_to_boundary(p).unwrap(), brute, epsilon = 1e-14);
    }

    #[test]
    fn segment_queries_on_gallery() {
        let sq = gallery::unit_square();
        assert!(sq.segment_in_domain(Point::new(0.1, 0.1), Point::new(0.9, 0.9), false));

        let slit = gallery::slit_square();
        assert!(!slit.segment_in_domain(Point::new(0.0, 0.1), Point::new(0.0, -0.1), false));
        // from the slit tip, the semi-open segment to the right misses the slit
        assert!(slit.segment_in_domain(Point::new(0.5, 0.0), Point::new(0.6, 0.0), true));
        assert!(!slit.segment_in_domain(Point::new(0.4, 0.0), Point::new(0.6, 0.0), true));
    }

    /// Dense-sampling oracle for segment containment. Sampling at pitch
    /// `len/n` cannot certify containment when the segment passes within one
    /// pitch of the boundary, so segments are only judged when the sampled
    /// evidence is unambiguous at that margin.
    #[test]
    fn segment_in_domain_matches_dense_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for dom in gallery::standard_gallery() {
            let bb = dom.bbox();
            let mut decided = 0u32;
            for _ in 0..100 {
                let p = Point::new(
                    bb.lo.x + rng.gen::<f64>() * bb.width(),
                    bb.lo.y + rng.gen::<f64>() * bb.height(),
                );
                let q = Point::new(
                    bb.lo.x + rng.gen::<f64>() * bb.width(),
                    bb.lo.y + rng.gen::<f64>() * bb.height(),
                );
                let claimed = dom.segment_in_domain(p, q, false);
                let n = 10_000;
                let margin = 4.0 * p.sup_dist(q) / n as f64;
                let mut all_inside = true;
                let mut clearly_outside = false;
                let mut grazes = false;
                for i in 0..=n {
                    let z = p.lerp(q, i as f64 / n as f64);
                    if dom.contains_interior(z) {
                        if dom.boundary_dist_within(z, margin).is_some() {
                            grazes = true;
                        }
                    } else {
                        all_inside = false;
                        if dom.boundary_dist_within(z, margin).is_none() {
                            clearly_outside = true;
                        }
                    }
                }
                if all_inside && !grazes {
                    assert!(claimed, "{}: sampling says inside", dom.name());
                    decided += 1;
                } else if clearly_outside {
                    assert!(!claimed, "{}: sampling found an outside point", dom.name());
                    decided += 1;
                }
            }
            assert!(decided >= 30, "{}: too few decisive segments", dom.name());
        }
    }

    #[test]
    fn visibility_on_square_and_slit() {
        let sq = gallery::unit_square();
        let q = Cube::new(Point::new(0.5, 0.5), 0.2);
        for x in [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.37),
            Point::new(0.25, 1.0),
        ] {
            assert!(sq.is_q_visible(&q, x), "{x:?} should see the center cube");
        }

        let slit = gallery::slit_square();
        let q_above = Cube::new(Point::new(0.0, 0.3), 0.05);
        let q_below = Cube::new(Point::new(0.0, -0.3), 0.05);
        let mid = Point::new(0.0, 0.0);
        // As a bare point the slit midpoint sees both cubes (the hull only
        // touches the slit at the point itself) ...
        assert!(slit.is_q_visible(&q_above, mid));
        assert!(slit.is_q_visible(&q_below, mid));
        // ... but the tagged faces are one-sided.
        let slit_id = slit
            .segments()
            .iter()
            .position(|s| s.is_slit())
            .unwrap() as u32;
        let top = FaceTag { segment: slit_id, side: slit.face_tag(slit_id, Point::new(0.0, 0.1)).side };
        let bottom = FaceTag { segment: slit_id, side: slit.face_tag(slit_id, Point::new(0.0, -0.1)).side };
        assert_ne!(top.side, bottom.side);
        assert!(slit.is_q_visible_sided(&q_above, mid, top));
        assert!(!slit.is_q_visible_sided(&q_above, mid, bottom));
        assert!(slit.is_q_visible_sided(&q_below, mid, bottom));
        assert!(!slit.is_q_visible_sided(&q_below, mid, top));
        // the slit tip sees cubes on either side, whatever the tag
        let tip = Point::new(0.5, 0.0);
        assert!(slit.is_q_visible_sided(&q_above, tip, top));
        assert!(slit.is_q_visible_sided(&q_below, tip, top));
        // a cube whose hull would cross the slit is blocked outright
        let far_above = Cube::new(Point::new(0.0, 0.5), 0.2);
        assert!(!slit.is_q_visible(&far_above, Point::new(0.0, -0.4)));
    }

    #[test]
    fn convex_domain_visibility_is_total() {
        let sq = gallery::unit_square();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c = Point::new(
                0.2 + 0.6 * rng.gen::<f64>(),
                0.2 + 0.6 * rng.gen::<f64>(),
            );
            let r = 0.02 + 0.1 * rng.gen::<f64>();
            let r = r.min(c.x - 0.01).min(c.y - 0.01).min(1.0 - c.x - 0.01).min(1.0 - c.y - 0.01);
            if r <= 0.0 {
                continue;
            }
            let q = Cube::new(c, r);
            // boundary points on all four sides
            for t in [0.0, 0.3, 0.77, 1.0] {
                for x in [
                    Point::new(t, 0.0),
                    Point::new(t, 1.0),
                    Point::new(0.0, t),
                    Point::new(1.0, t),
                ] {
                    assert!(sq.is_q_visible(&q, x));
                }
            }
        }
    }

    #[test]
    fn dist_decreases_along_ray_to_boundary() {
        let d = gallery::slit_square();
        let from = Point::new(0.3, 0.5);
        let to = Point::new(0.3, 0.0); // lands on the slit
        let mut last = f64::INFINITY;
        for i in 1..40 {
            let t = i as f64 / 40.0;
            let p = from.lerp(to, t);
            let dist = d.dist_to_boundary(p).unwrap();
            assert!(dist <= last + 1e-12);
            last = dist;
        }
        assert!(last < 0.02);
    }

    #[test]
    fn gallery_constructors_and_names() {
        for dom in gallery::standard_gallery() {
            assert_eq!(dom.components(), 1, "{} must be connected", dom.name());
            assert!(dom.contains_interior(dom.basepoint()), "{}", dom.name());
        }
        assert!(gallery::by_name("comb_3").is_ok());
        assert!(gallery::by_name("cusp_1.5").is_ok());
        assert!(gallery::by_name("comb_0").is_err());
        assert!(gallery::by_name("nonsense").is_err());
    }

    #[test]
    fn grid_domain_round_trip() {
        let rows = vec![
            "11111".to_string(),
            "10001".to_string(),
            "10001".to_string(),
            "11111".to_string(),
        ];
        let d = Domain::grid("ring", 0.25, &rows).unwrap();
        // ring of cells: center cell block is outside
        assert!(d.contains_interior(Point::new(0.125, 0.125)));
        assert!(!d.contains_interior(Point::new(0.6, 0.5)));
        // coarse distance agrees with the exact one to within a cell
        let p = Point::new(0.125, 0.5);
        let exact = d.dist_to_boundary(p).unwrap();
        assert!((d.coarse_dist(p) - exact).abs() <= 0.25 + 1e-12);
    }

    #[test]
    fn box_union_l_shape() {
        let l = Domain::box_union(
            "l_shape",
            vec![
                Rect::new(Point::new(0.0, 0.0), Point::new(2.0, 1.0)),
                Rect::new(Point::new(0.0, 0.0), Point::new(1.0, 2.0)),
            ],
        )
        .unwrap();
        assert!(l.contains_interior(Point::new(0.5, 0.5)));
        assert!(l.contains_interior(Point::new(1.5, 0.5)));
        assert!(l.contains_interior(Point::new(0.5, 1.5)));
        assert!(!l.contains_interior(Point::new(1.5, 1.5)));
        // the seam x=1, y in (0,1) is interior
        assert!(l.contains_interior(Point::new(1.0, 0.5)));
        assert_abs_diff_eq!(
            l.dist_to_boundary(Point::new(1.0, 0.5)).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        // through the interior seam, below the re-entrant corner at (1,1)
        assert!(l.segment_in_domain(Point::new(0.5, 1.5), Point::new(1.4, 0.4), false));
        // exactly through the re-entrant corner: touches the boundary
        assert!(!l.segment_in_domain(Point::new(0.5, 1.5), Point::new(1.5, 0.5), false));
    }

    #[test]
    fn domain_json_load() {
        let text = r#"{"type":"polygon","outer":[[0,0],[2,0],[2,2],[0,2]],
                       "slits":[[[0.5,1.0],[1.5,1.0]]]}"#;
        let d = Domain::from_json_str("loaded", text).unwrap();
        assert!(d.contains_interior(Point::new(1.0, 0.5)));
        assert!(!d.segment_in_domain(Point::new(1.0, 0.9), Point::new(1.0, 1.1), false));
        assert!(Domain::from_json_str("bad", "{not json").is_err());
    }
}
