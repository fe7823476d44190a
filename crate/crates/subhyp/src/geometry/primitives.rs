//! Points, rectangles, cubes and exact sup-norm distance kernels.
//!
//! Distances are measured in the uniform norm `‖x‖ = max(|x1|, |x2|)`, so a
//! "cube" `Q(x, r)` is the axis-aligned square of half-side `r`. The segment
//! distance kernels are exact: the objective is a pointwise maximum of
//! finitely many linear functions of the segment parameter, so the minimum is
//! attained at an endpoint or at a crossing of two pieces, all of which are
//! enumerated.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Uniform-norm distance to another point.
    pub fn sup_dist(self, other: Point) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn euclid_dist(self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Cross product of `a - o` and `b - o`.
pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Axis-aligned rectangle given by its lower-left and upper-right corners.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Point,
    pub hi: Point,
}

impl Rect {
    pub fn new(lo: Point, hi: Point) -> Self {
        Rect { lo, hi }
    }

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        Rect { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi.x - self.lo.x
    }

    pub fn height(&self) -> f64 {
        self.hi.y - self.lo.y
    }

    pub fn max_side(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.lo.x + self.hi.x), 0.5 * (self.lo.y + self.hi.y))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }

    pub fn inflate(&self, pad: f64) -> Rect {
        Rect::new(
            Point::new(self.lo.x - pad, self.lo.y - pad),
            Point::new(self.hi.x + pad, self.hi.y + pad),
        )
    }

    /// Sup-norm distance from a point to this closed rectangle (0 inside).
    pub fn sup_dist_point(&self, p: Point) -> f64 {
        let dx = (self.lo.x - p.x).max(p.x - self.hi.x).max(0.0);
        let dy = (self.lo.y - p.y).max(p.y - self.hi.y).max(0.0);
        dx.max(dy)
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.lo.x <= other.hi.x
            && other.lo.x <= self.hi.x
            && self.lo.y <= other.hi.y
            && other.lo.y <= self.hi.y
    }
}

/// Sup-norm ball: an axis-aligned square with center and half-side `radius`.
/// Its diameter in the uniform norm is exactly `2 * radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub center: Point,
    pub radius: f64,
}

impl Cube {
    pub fn new(center: Point, radius: f64) -> Self {
        debug_assert!(radius > 0.0);
        Cube { center, radius }
    }

    pub fn diam(&self) -> f64 {
        2.0 * self.radius
    }

    /// Dilation by `lambda` about the center: `lambda * Q(x, r) = Q(x, lambda r)`.
    pub fn dilate(&self, lambda: f64) -> Cube {
        Cube::new(self.center, self.radius * lambda)
    }

    pub fn rect(&self) -> Rect {
        Rect::new(
            Point::new(self.center.x - self.radius, self.center.y - self.radius),
            Point::new(self.center.x + self.radius, self.center.y + self.radius),
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        self.center.sup_dist(p) <= self.radius
    }

    pub fn corners(&self) -> [Point; 4] {
        let r = self.radius;
        let c = self.center;
        [
            Point::new(c.x - r, c.y - r),
            Point::new(c.x + r, c.y - r),
            Point::new(c.x + r, c.y + r),
            Point::new(c.x - r, c.y + r),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn eval(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    /// Length in the uniform norm.
    pub fn sup_len(&self) -> f64 {
        self.a.sup_dist(self.b)
    }

    pub fn bbox(&self) -> Rect {
        Rect::from_points([&self.a, &self.b])
    }

    /// Exact sup-norm distance from `p` to this segment, together with the
    /// parameter of the nearest segment point.
    pub fn sup_dist_point(&self, p: Point) -> (f64, f64) {
        // f(t) = max(|ax + t dx|, |ay + t dy|) with a = a - p, d = b - a.
        let ax = self.a.x - p.x;
        let ay = self.a.y - p.y;
        let dx = self.b.x - self.a.x;
        let dy = self.b.y - self.a.y;

        let mut cand = [0.0f64, 1.0, f64::NAN, f64::NAN, f64::NAN, f64::NAN];
        let mut n = 2;
        let mut push = |t: f64| {
            if t.is_finite() && t > 0.0 && t < 1.0 {
                cand[n] = t;
                n += 1;
            }
        };
        if dx != 0.0 {
            push(-ax / dx);
        }
        if dy != 0.0 {
            push(-ay / dy);
        }
        // |u| = |v| crossings: u = ±v.
        if dx != dy {
            push((ay - ax) / (dx - dy));
        }
        if dx != -dy {
            push(-(ax + ay) / (dx + dy));
        }

        let mut best = f64::INFINITY;
        let mut best_t = 0.0;
        for &t in &cand[..n] {
            let v = (ax + t * dx).abs().max((ay + t * dy).abs());
            if v < best {
                best = v;
                best_t = t;
            }
        }
        (best, best_t)
    }

    /// Exact sup-norm distance from this segment to a closed rectangle
    /// (0 if they touch), with the parameter of the nearest segment point.
    pub fn sup_dist_rect(&self, r: &Rect) -> (f64, f64) {
        // rectdist(p(t)) = max(l1..l4, 0) with four linear pieces.
        let px = |t: f64| self.a.x + t * (self.b.x - self.a.x);
        let py = |t: f64| self.a.y + t * (self.b.y - self.a.y);
        // pieces as (constant, slope) in t
        let dx = self.b.x - self.a.x;
        let dy = self.b.y - self.a.y;
        let pieces = [
            (r.lo.x - self.a.x, -dx),
            (self.a.x - r.hi.x, dx),
            (r.lo.y - self.a.y, -dy),
            (self.a.y - r.hi.y, dy),
            (0.0, 0.0),
        ];
        let mut cand = [0.0f64; 24];
        cand[0] = 0.0;
        cand[1] = 1.0;
        let mut n = 2;
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                let (c1, s1) = pieces[i];
                let (c2, s2) = pieces[j];
                if s1 != s2 {
                    let t = (c2 - c1) / (s1 - s2);
                    if t.is_finite() && t > 0.0 && t < 1.0 {
                        cand[n] = t;
                        n += 1;
                    }
                }
            }
        }
        let mut best = f64::INFINITY;
        let mut best_t = 0.0;
        for &t in &cand[..n] {
            let ex = (r.lo.x - px(t)).max(px(t) - r.hi.x).max(0.0);
            let ey = (r.lo.y - py(t)).max(py(t) - r.hi.y).max(0.0);
            let v = ex.max(ey);
            if v < best {
                best = v;
                best_t = t;
            }
        }
        (best, best_t)
    }

    /// Unit-ish normal (left of the direction a -> b); not normalized.
    pub fn normal(&self) -> Point {
        Point::new(-(self.b.y - self.a.y), self.b.x - self.a.x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegSegIntersection {
    None,
    /// Transversal or endpoint intersection at a single point.
    At(Point),
    /// Collinear overlap along a sub-segment.
    Overlap(Point, Point),
}

/// Intersection of two closed segments. `eps` is an absolute tolerance used
/// for the collinearity test and for the parameter range.
pub fn seg_seg_intersection(s1: &Segment, s2: &Segment, eps: f64) -> SegSegIntersection {
    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let denom = d1.x * d2.y - d1.y * d2.x;
    let scale = d1.x.abs().max(d1.y.abs()).max(d2.x.abs()).max(d2.y.abs()).max(1e-300);

    if denom.abs() <= eps * scale {
        // Parallel. Collinear iff s2.a lies on the line of s1.
        let c = cross(s1.a, s1.b, s2.a);
        if c.abs() > eps * scale * scale.max(1.0) {
            return SegSegIntersection::None;
        }
        // Project on the dominant axis of s1.
        let along = |p: Point| {
            if d1.x.abs() >= d1.y.abs() {
                (p.x - s1.a.x) / if d1.x != 0.0 { d1.x } else { 1.0 }
            } else {
                (p.y - s1.a.y) / d1.y
            }
        };
        if d1.x.abs().max(d1.y.abs()) <= eps {
            // s1 degenerate; treat as point test
            let (d, _) = s2.sup_dist_point(s1.a);
            return if d <= eps {
                SegSegIntersection::At(s1.a)
            } else {
                SegSegIntersection::None
            };
        }
        let mut t0 = along(s2.a);
        let mut t1 = along(s2.b);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        let lo = t0.max(0.0);
        let hi = t1.min(1.0);
        let tol = eps / d1.x.abs().max(d1.y.abs());
        if lo > hi + tol {
            return SegSegIntersection::None;
        }
        if (hi - lo).abs() <= tol {
            return SegSegIntersection::At(s1.eval(lo.clamp(0.0, 1.0)));
        }
        return SegSegIntersection::Overlap(s1.eval(lo), s1.eval(hi));
    }

    let w = s2.a - s1.a;
    let t = (w.x * d2.y - w.y * d2.x) / denom;
    let u = (w.x * d1.y - w.y * d1.x) / denom;
    let tol1 = eps / d1.x.abs().max(d1.y.abs()).max(1e-300);
    let tol2 = eps / d2.x.abs().max(d2.y.abs()).max(1e-300);
    if t >= -tol1 && t <= 1.0 + tol1 && u >= -tol2 && u <= 1.0 + tol2 {
        SegSegIntersection::At(s1.eval(t.clamp(0.0, 1.0)))
    } else {
        SegSegIntersection::None
    }
}

/// Convex hull of a small point set (monotone chain), counter-clockwise,
/// without repetition of the first point.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|p, q| {
        p.x.partial_cmp(&q.x)
            .unwrap()
            .then(p.y.partial_cmp(&q.y).unwrap())
    });
    pts.dedup_by(|p, q| p.x == q.x && p.y == q.y);
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Is `p` inside (or within `eps` of) the closed convex polygon `hull`
/// (counter-clockwise vertex order)?
pub fn point_in_convex(hull: &[Point], p: Point, eps: f64) -> bool {
    if hull.len() < 3 {
        if hull.len() == 2 {
            let (d, _) = Segment::new(hull[0], hull[1]).sup_dist_point(p);
            return d <= eps;
        }
        return hull.len() == 1 && hull[0].sup_dist(p) <= eps;
    }
    for i in 0..hull.len() {
        let j = (i + 1) % hull.len();
        if cross(hull[i], hull[j], p) < -eps {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Brute-force sup distance to a segment by dense sampling.
    fn seg_dist_brute(s: &Segment, p: Point) -> f64 {
        (0..=4000)
            .map(|i| s.eval(i as f64 / 4000.0).sup_dist(p))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn point_segment_dist_exact_cases() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        assert_abs_diff_eq!(s.sup_dist_point(Point::new(0.5, 0.3)).0, 0.3);
        assert_abs_diff_eq!(s.sup_dist_point(Point::new(2.0, 0.0)).0, 1.0);
        assert_abs_diff_eq!(s.sup_dist_point(Point::new(-1.0, -1.0)).0, 1.0);
        // Diagonal segment: sup-distance differs from the euclidean one.
        let d = Segment::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        assert_abs_diff_eq!(d.sup_dist_point(Point::new(1.0, 0.0)).0, 0.5);
    }

    #[test]
    fn segment_rect_dist_cases() {
        let r = Rect::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        let s = Segment::new(Point::new(2.0, -1.0), Point::new(2.0, 2.0));
        assert_abs_diff_eq!(s.sup_dist_rect(&r).0, 1.0);
        let s2 = Segment::new(Point::new(-1.0, 2.5), Point::new(2.0, 2.5));
        assert_abs_diff_eq!(s2.sup_dist_rect(&r).0, 1.5);
        let crossing = Segment::new(Point::new(-1.0, 0.5), Point::new(2.0, 0.5));
        assert_abs_diff_eq!(crossing.sup_dist_rect(&r).0, 0.0);
    }

    #[test]
    fn seg_seg_basic() {
        let s1 = Segment::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        let s2 = Segment::new(Point::new(0.0, 1.0), Point::new(1.0, 0.0));
        match seg_seg_intersection(&s1, &s2, 1e-12) {
            SegSegIntersection::At(p) => {
                assert_abs_diff_eq!(p.x, 0.5);
                assert_abs_diff_eq!(p.y, 0.5);
            }
            other => panic!("expected point intersection, got {other:?}"),
        }
        let s3 = Segment::new(Point::new(0.25, 0.25), Point::new(2.0, 2.0));
        assert!(matches!(
            seg_seg_intersection(&s1, &s3, 1e-12),
            SegSegIntersection::Overlap(..)
        ));
        let s4 = Segment::new(Point::new(0.0, 1.0), Point::new(1.0, 2.0));
        assert!(matches!(
            seg_seg_intersection(&s1, &s4, 1e-12),
            SegSegIntersection::None
        ));
        // touching at an endpoint
        let s5 = Segment::new(Point::new(1.0, 1.0), Point::new(2.0, 0.0));
        assert!(matches!(
            seg_seg_intersection(&s1, &s5, 1e-12),
            SegSegIntersection::At(_)
        ));
    }

    #[test]
    fn hull_of_square_plus_point() {
        let c = Cube::new(Point::new(0.0, 0.0), 1.0);
        let mut pts = c.corners().to_vec();
        pts.push(Point::new(3.0, 0.0));
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 5);
        assert!(point_in_convex(&hull, Point::new(1.5, 0.1), 1e-12));
        assert!(!point_in_convex(&hull, Point::new(1.5, 1.5), 1e-12));
    }

    proptest! {
        #[test]
        fn point_segment_dist_matches_brute(
            ax in -2.0f64..2.0, ay in -2.0f64..2.0,
            bx in -2.0f64..2.0, by in -2.0f64..2.0,
            px in -3.0f64..3.0, py in -3.0f64..3.0,
        ) {
            let s = Segment::new(Point::new(ax, ay), Point::new(bx, by));
            let p = Point::new(px, py);
            let exact = s.sup_dist_point(p).0;
            let brute = seg_dist_brute(&s, p);
            prop_assert!(exact <= brute + 1e-9);
            prop_assert!(brute <= exact + 2e-3 * (1.0 + s.sup_len()));
        }

        #[test]
        fn segment_rect_dist_matches_brute(
            ax in -2.0f64..2.0, ay in -2.0f64..2.0,
            bx in -2.0f64..2.0, by in -2.0f64..2.0,
            cx in -1.0f64..1.0, cy in -1.0f64..1.0,
            r in 0.05f64..1.0,
        ) {
            let s = Segment::new(Point::new(ax, ay), Point::new(bx, by));
            let rect = Cube::new(Point::new(cx, cy), r).rect();
            let exact = s.sup_dist_rect(&rect).0;
            let brute = (0..=4000)
                .map(|i| rect.sup_dist_point(s.eval(i as f64 / 4000.0)))
                .fold(f64::INFINITY, f64::min);
            prop_assert!(exact <= brute + 1e-9);
            prop_assert!(brute <= exact + 2e-3 * (1.0 + s.sup_len()));
        }
    }
}
