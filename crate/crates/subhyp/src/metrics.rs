//! Subhyperbolic lengths and the metrics `d_alpha`, `d~_alpha`.
//!
//! The subhyperbolic length of a curve is the line integral of
//! `dist(z, boundary)^(alpha - 1)` in the sup norm (both the distance and the
//! arc-length element). The metric `d_alpha(x, y)` is the infimum of that
//! length over curves joining `x` to `y`; `d~_alpha` adds `|x - y|^alpha`.
//!
//! Estimates come from the chain characterization: Dijkstra on the Whitney
//! adjacency graph with node cost `(diam Q)^alpha` yields the cheapest chain
//! of touching cubes, and the broken line through cube centers and touch
//! points of that chain is a genuine curve in the domain whose quadrature
//! length is a true upper bound. `|x - y|^alpha` is always a certified lower
//! bound for `d~_alpha`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::geometry::{Domain, Point, Segment};
use crate::whitney::WhitneyDecomposition;
use crate::{Error, Result};

/// Exponent `alpha` in `(0, 1]`, optionally derived from a Sobolev exponent
/// `p > n` as `alpha = (p - n) / (p - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaParam {
    alpha: f64,
}

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(AlphaParam { alpha })
    }

    /// `alpha = (p - n) / (p - 1)` for a Sobolev exponent `p > n`.
    pub fn from_exponent(p: f64, n: u32) -> Result<Self> {
        if !(p > n as f64) {
            return Err(Error::InvalidInput(format!("need p > n, got p = {p}, n = {n}")));
        }
        Self::new((p - n as f64) / (p - 1.0))
    }

    pub fn value(self) -> f64 {
        self.alpha
    }

    pub fn pow(self, d: f64) -> f64 {
        d.powf(self.alpha)
    }
}

/// Two-sided estimate of a metric value.
#[derive(Clone, Debug, Serialize)]
pub struct MetricEstimate {
    /// Quadrature length of an explicit curve (plus the Hoelder term for
    /// `d~_alpha`): a true upper bound.
    pub upper: f64,
    /// `sum (diam Q_i)^alpha` over the best chain found.
    pub chain_sum: f64,
    /// Cube ids of that chain, from the cube of `x` to the cube of `y`.
    pub chain: Vec<u32>,
    /// A certified lower bound (0 when no regime information applies).
    pub certified_lower: f64,
}

impl MetricEstimate {
    fn zero() -> Self {
        MetricEstimate {
            upper: 0.0,
            chain_sum: 0.0,
            chain: Vec::new(),
            certified_lower: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.upper.is_finite()
    }
}

/// Default relative quadrature tolerance.
pub const DEFAULT_QUAD_TOL: f64 = 1e-6;
/// Partial sums beyond this guard declare the length divergent.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Bundles a domain, a Whitney decomposition of it and an exponent.
pub struct MetricSpace<'a> {
    pub domain: &'a Domain,
    pub whitney: &'a WhitneyDecomposition,
    pub alpha: AlphaParam,
    quad_tol: f64,
    guard: f64,
}

impl<'a> MetricSpace<'a> {
    pub fn new(
        domain: &'a Domain,
        whitney: &'a WhitneyDecomposition,
        alpha: AlphaParam,
    ) -> Self {
        MetricSpace {
            domain,
            whitney,
            alpha,
            quad_tol: DEFAULT_QUAD_TOL,
            guard: DIVERGENCE_GUARD,
        }
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    /// Node cost `(diam Q)^alpha`.
    pub fn cube_weight(&self, id: usize) -> f64 {
        self.alpha.pow(self.whitney.cubes()[id].diam())
    }

    /// `sum (diam Q)^alpha` over a list of cube ids.
    pub fn chain_cost(&self, chain: &[u32]) -> f64 {
        chain.iter().map(|&id| self.cube_weight(id as usize)).sum()
    }

    /// Adaptive quadrature of the subhyperbolic length of a polyline.
    /// Endpoints may lie on the boundary; the endpoint singularity is summed
    /// over dyadically shrinking sub-segments. Exceeding the divergence
    /// guard, or a non-decaying singular tail, reports a divergent length.
    pub fn subhyperbolic_length(&self, polyline: &[Point]) -> Result<f64> {
        let mut total = 0.0;
        for pair in polyline.windows(2) {
            total += self.segment_length(&Segment::new(pair[0], pair[1]), 0.0)?;
            if total > self.guard {
                return Err(Error::DivergentLength(self.guard));
            }
        }
        Ok(total)
    }

    /// Subhyperbolic length of one segment. `rho_hint` is a known lower bound
    /// for the boundary distance along the segment (0 when unknown); it only
    /// accelerates the distance queries.
    fn segment_length(&self, seg: &Segment, rho_hint: f64) -> Result<f64> {
        // canonical orientation, so reversed inputs sum identically
        if (seg.b.x, seg.b.y) < (seg.a.x, seg.a.y) {
            return self.segment_length(&Segment::new(seg.b, seg.a), rho_hint);
        }
        let len = seg.sup_len();
        if len == 0.0 {
            return Ok(0.0);
        }
        let mid = seg.eval(0.5);
        if !self.domain.contains_interior(mid)
            && self.domain.boundary_dist_raw(mid) > self.domain.eps()
        {
            return Err(Error::SegmentLeavesDomain(seg.a.x, seg.a.y, seg.b.x, seg.b.y));
        }
        let eps = self.domain.eps();
        let rho = |t: f64| -> f64 {
            let p = seg.eval(t);
            if rho_hint > 0.0 {
                self.domain.boundary_dist_from(p, rho_hint)
            } else {
                self.domain.boundary_dist_raw(p)
            }
        };
        let a_singular = self.domain.boundary_dist_raw(seg.a) <= eps;
        let b_singular = self.domain.boundary_dist_raw(seg.b) <= eps;

        let mut t0 = 0.0;
        let mut t1 = 1.0;
        let mut total = 0.0;
        if a_singular {
            t0 = 0.25;
            total += self.singular_tail(len, 0.0, t0, &rho)?;
        }
        if b_singular {
            t1 = 0.75;
            total += self.singular_tail(len, 1.0, t1, &rho)?;
        }
        let f = |t: f64| len * rho(t).powf(self.alpha.value() - 1.0);
        total += adaptive_simpson_rel(&f, t0, t1, self.quad_tol, 28);
        if !total.is_finite() || total > self.guard {
            return Err(Error::DivergentLength(self.guard));
        }
        Ok(total)
    }

    /// Integral over the dyadic ladder toward a boundary endpoint at
    /// parameter `t_end`, covering `[t_end, t_inner]`.
    fn singular_tail(
        &self,
        len: f64,
        t_end: f64,
        t_inner: f64,
        rho: &impl Fn(f64) -> f64,
    ) -> Result<f64> {
        let span = t_inner - t_end; // signed
        let am1 = self.alpha.value() - 1.0;
        let mut total = 0.0;
        let mut prev_piece = f64::INFINITY;
        for k in 0..64 {
            let hi = t_end + span * 0.5f64.powi(k);
            let lo = t_end + span * 0.5f64.powi(k + 1);
            let piece = gauss4(&|t: f64| len * rho(t).powf(am1), lo.min(hi), lo.max(hi));
            total += piece;
            if !total.is_finite() || total > self.guard {
                return Err(Error::DivergentLength(self.guard));
            }
            if k >= 8 && piece < self.quad_tol * total {
                let ratio = (piece / prev_piece).min(0.95);
                total += piece * ratio / (1.0 - ratio);
                return Ok(total);
            }
            prev_piece = piece;
        }
        // the ladder never started decaying
        if prev_piece > 1e-3 * total.max(1e-300) {
            return Err(Error::DivergentLength(self.guard));
        }
        Ok(total)
    }

    fn locate_required(&self, p: Point) -> Result<usize> {
        if !self.domain.contains_interior(p) {
            return Err(Error::OutsideDomain(p.x, p.y));
        }
        self.whitney.locate(p).ok_or(Error::DeficitRegion(p.x, p.y))
    }

    /// Shortest node-weighted path costs from multiple seed cubes. Seeds
    /// carry their initial cost (normally their own weight). Unreachable
    /// cubes hold `f64::INFINITY`.
    pub fn multi_source(&self, seeds: &[(usize, f64)]) -> Vec<f64> {
        self.multi_source_with_prev(seeds).0
    }

    fn multi_source_with_prev(&self, seeds: &[(usize, f64)]) -> (Vec<f64>, Vec<u32>) {
        let n = self.whitney.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![u32::MAX; n];
        let mut heap = BinaryHeap::new();
        for &(s, c) in seeds {
            if c < dist[s] {
                dist[s] = c;
                heap.push(HeapItem { cost: c, node: s as u32 });
            }
        }
        while let Some(HeapItem { cost, node }) = heap.pop() {
            if cost > dist[node as usize] {
                continue;
            }
            let nbrs = self.whitney.neighbors(node as usize).expect("valid id");
            for &nb in nbrs {
                let next = cost + self.cube_weight(nb as usize);
                if next < dist[nb as usize] {
                    dist[nb as usize] = next;
                    prev[nb as usize] = node;
                    heap.push(HeapItem { cost: next, node: nb });
                }
            }
        }
        (dist, prev)
    }

    /// Single-source costs from one cube, initialized with its own weight.
    pub fn single_source(&self, source: usize) -> Vec<f64> {
        self.multi_source(&[(source, self.cube_weight(source))])
    }

    /// Cheapest chain of touching cubes from the cube of `x` to the cube of
    /// `y` (ids, in order).
    pub fn best_chain(&self, x: Point, y: Point) -> Result<Vec<u32>> {
        Ok(self.d_alpha(x, y)?.chain)
    }

    /// Chain estimate of `d_alpha(x, y)`.
    pub fn d_alpha(&self, x: Point, y: Point) -> Result<MetricEstimate> {
        if x.sup_dist(y) == 0.0 {
            return Ok(MetricEstimate::zero());
        }
        // the metric is symmetric; canonicalize for reproducible output
        if (y.x, y.y) < (x.x, x.y) {
            return self.d_alpha(y, x);
        }
        let qx = self.locate_required(x)?;
        let qy = self.locate_required(y)?;

        let (chain, chain_sum) = if qx == qy {
            (vec![qx as u32], self.cube_weight(qx))
        } else {
            let (dist, prev) = self.multi_source_with_prev(&[(qx, self.cube_weight(qx))]);
            if !dist[qy].is_finite() {
                return Ok(MetricEstimate {
                    upper: f64::INFINITY,
                    chain_sum: f64::INFINITY,
                    chain: Vec::new(),
                    certified_lower: self.far_regime_lower(x, y),
                });
            }
            let mut chain = vec![qy as u32];
            let mut cur = qy as u32;
            while cur != qx as u32 {
                cur = prev[cur as usize];
                chain.push(cur);
            }
            chain.reverse();
            (chain, dist[qy])
        };

        let mut upper = self.chain_polyline_length(&chain, x, y)?;
        // a straight segment, when admissible, is also a competitor
        if self.domain.segment_in_domain(x, y, false) {
            if let Ok(direct) = self.segment_length(&Segment::new(x, y), 0.0) {
                upper = upper.min(direct);
            }
        }
        Ok(MetricEstimate {
            upper,
            chain_sum,
            chain,
            certified_lower: self.far_regime_lower(x, y),
        })
    }

    /// `d~_alpha(x, y) = d_alpha(x, y) + |x - y|^alpha`; the Hoelder term is
    /// exact and is itself a certified lower bound.
    pub fn d_tilde(&self, x: Point, y: Point) -> Result<MetricEstimate> {
        let mut e = self.d_alpha(x, y)?;
        let hoelder = self.alpha.pow(x.sup_dist(y));
        e.upper += hoelder;
        e.certified_lower = e.certified_lower.max(hoelder);
        debug_assert!(
            !e.upper.is_finite()
                || e.upper <= (1.0 + 2.0 / self.alpha.value()) * e.chain_sum + hoelder + 1e-9,
            "chain bound violated"
        );
        Ok(e)
    }

    /// In the far regime `|x-y| >= min(rho(x), rho(y))` the subhyperbolic
    /// metric dominates `2^(alpha-1) |x-y|^alpha`.
    fn far_regime_lower(&self, x: Point, y: Point) -> f64 {
        let rx = self.domain.boundary_dist_raw(x);
        let ry = self.domain.boundary_dist_raw(y);
        let sep = x.sup_dist(y);
        if sep >= rx.min(ry) {
            0.5f64.powf(1.0 - self.alpha.value()) * self.alpha.pow(sep)
        } else {
            0.0
        }
    }

    /// Quadrature length of the broken line through cube centers and touch
    /// points of a chain, from `x` in the first cube to `y` in the last.
    fn chain_polyline_length(&self, chain: &[u32], x: Point, y: Point) -> Result<f64> {
        let cubes = self.whitney.cubes();
        let mut total = 0.0;
        let mut prev_point = x;
        for (k, &id) in chain.iter().enumerate() {
            let c = &cubes[id as usize];
            let hint = c.dist_boundary;
            let center = c.cube.center;
            total += self.segment_length(&Segment::new(prev_point, center), hint)?;
            prev_point = center;
            if k + 1 < chain.len() {
                let n = &cubes[chain[k + 1] as usize];
                let touch = touch_point(c.cube.rect(), n.cube.rect());
                total += self
                    .segment_length(&Segment::new(prev_point, touch), hint.min(n.dist_boundary))?;
                prev_point = touch;
            }
            if total > self.guard {
                return Err(Error::DivergentLength(self.guard));
            }
        }
        let last = &cubes[*chain.last().unwrap() as usize];
        total += self.segment_length(&Segment::new(prev_point, y), last.dist_boundary)?;
        Ok(total)
    }
}

/// Midpoint of the (possibly degenerate) overlap rectangle of two touching
/// closed cubes.
fn touch_point(a: crate::geometry::Rect, b: crate::geometry::Rect) -> Point {
    let lo_x = a.lo.x.max(b.lo.x);
    let hi_x = a.hi.x.min(b.hi.x);
    let lo_y = a.lo.y.max(b.lo.y);
    let hi_y = a.hi.y.min(b.hi.y);
    Point::new(0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y))
}

#[derive(PartialEq)]
struct HeapItem {
    cost: f64,
    node: u32,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap by cost, ties by node id for determinism
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn gauss4(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [
        -0.861136311594053,
        -0.339981043584856,
        0.339981043584856,
        0.861136311594053,
    ];
    const W: [f64; 4] = [
        0.347854845137454,
        0.652145154862546,
        0.652145154862546,
        0.347854845137454,
    ];
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    h * X.iter().zip(W).map(|(&x, w)| w * f(c + h * x)).sum::<f64>()
}

/// Adaptive Simpson quadrature with a tolerance relative to the first whole
/// estimate.
fn adaptive_simpson_rel(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: u32,
) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let tol = rel_tol * whole.abs().max(1e-300);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gallery, Rect};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn half_plane_box() -> Domain {
        Domain::polygon(
            "big_box",
            vec![
                Point::new(-10.0, 0.0),
                Point::new(10.0, 0.0),
                Point::new(10.0, 20.0),
                Point::new(-10.0, 20.0),
            ],
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn closed_form_vertical_segment() {
        // near the bottom edge rho((0, y)) = y, so the alpha = 1/2 length of
        // the vertical segment from y = 1 to 4 is the integral of y^(-1/2):
        // 2 (sqrt 4 - sqrt 1) = 2.
        let d = half_plane_box();
        let w = WhitneyDecomposition::build(&d, 4).unwrap();
        let ms = MetricSpace::new(&d, &w, AlphaParam::new(0.5).unwrap());
        let v = ms
            .subhyperbolic_length(&[Point::new(0.0, 1.0), Point::new(0.0, 4.0)])
            .unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-5);
    }

    #[test]
    fn alpha_one_is_arclength() {
        let d = gallery::unit_square();
        let w = WhitneyDecomposition::build(&d, 4).unwrap();
        let ms = MetricSpace::new(&d, &w, AlphaParam::new(1.0).unwrap());
        let poly = [
            Point::new(0.2, 0.2),
            Point::new(0.8, 0.3),
            Point::new(0.5, 0.7),
        ];
        let expect: f64 = poly.windows(2).map(|p| p[0].sup_dist(p[1])).sum();
        let v = ms.subhyperbolic_length(&poly).unwrap();
        assert_abs_diff_eq!(v, expect, epsilon = 1e-9);
    }

    #[test]
    fn singular_endpoint_converges() {
        // segment reaching the boundary: integral of y^(alpha-1) over [0, 1]
        // equals 1/alpha
        let d = half_plane_box();
        let w = WhitneyDecomposition::build(&d, 4).unwrap();
        for alpha in [0.3, 0.5, 0.9] {
            let ms = MetricSpace::new(&d, &w, AlphaParam::new(alpha).unwrap());
            let v = ms
                .subhyperbolic_length(&[Point::new(0.0, 0.0), Point::new(0.0, 1.0)])
                .unwrap();
            assert_abs_diff_eq!(v, 1.0 / alpha, epsilon = 3e-4 / alpha);
        }
    }

    #[test]
    fn segment_on_slit_diverges() {
        let d = gallery::slit_square();
        let w = WhitneyDecomposition::build(&d, 5).unwrap();
        let ms = MetricSpace::new(&d, &w, AlphaParam::new(0.5).unwrap());
        let r = ms.subhyperbolic_length(&[Point::new(-0.4, 0.0), Point::new(0.4, 0.0)]);
        assert!(
            matches!(r, Err(Error::DivergentLength(_)) | Err(Error::SegmentLeavesDomain(..))),
            "{r:?}"
        );
    }

    #[test]
    fn lemma_bound_inside_cube() {
        // a segment with |x - y| <= max(rho(x), rho(y)) has subhyperbolic
        // length at most |x - y|^alpha / alpha
        let d = gallery::unit_square();
        let w = WhitneyDecomposition::build(&d, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &alpha in &[0.33, 0.5, 1.0] {
            let ms = MetricSpace::new(&d, &w, AlphaParam::new(alpha).unwrap());
            for _ in 0..40 {
                let x = Point::new(0.2 + 0.6 * rng.gen::<f64>(), 0.2 + 0.6 * rng.gen::<f64>());
                let y = Point::new(0.2 + 0.6 * rng.gen::<f64>(), 0.2 + 0.6 * rng.gen::<f64>());
                let rx = d.boundary_dist_raw(x);
                let ry = d.boundary_dist_raw(y);
                if x.sup_dist(y) > rx.max(ry) || x.sup_dist(y) == 0.0 {
                    continue;
                }
                let v = ms.subhyperbolic_length(&[x, y]).unwrap();
                let bound = x.sup_dist(y).powf(alpha) / alpha;
                assert!(v <= bound * (1.0 + 1e-6), "{v} > {bound}");
            }
        }
    }

    #[test]
    fn identity_and_symmetry() {
        let d = gallery::slit_square();
        let w = WhitneyDecomposition::build(&d, 7).unwrap();
        let ms = MetricSpace::new(&d, &w, AlphaParam::new(0.5).unwrap());
        let e = ms.d_tilde(Point::new(0.3, 0.3), Point::new(0.3, 0.3)).unwrap();
        assert_eq!(e.upper, 0.0);
        assert_eq!(e.chain_sum, 0.0);
        assert_eq!(e.certified_lower, 0.0);

        let x = Point::new(0.0, 0.1);
        let y = Point::new(0.0, -0.1);
        let exy = ms.d_tilde(x, y).unwrap();
        let eyx = ms.d_tilde(y, x).unwrap();
        assert_eq!(exy.upper, eyx.upper); // canonicalized internally
        assert_eq!(exy.chain_sum, eyx.chain_sum);
    }

    #[test]
    fn across_slit_pair_is_expensive() {
        let d = gallery::slit_square();
        let w = WhitneyDecomposition::build(&d, 8).unwrap();
        let ms = MetricSpace::new(&d, &w, AlphaParam::new(0.5).unwrap());
        let x = Point::new(0.0, 0.1);
        let y = Point::new(0.0, -0.1);
        let e = ms.d_tilde(x, y).unwrap();
        // the chain has to round a slit tip at distance 1/2
        assert!(e.upper >= 0.5f64.sqrt(), "upper = {}", e.upper);
        assert!(e.upper >= 3.0 * ms.alpha.pow(x.sup_dist(y)), "far pair");
        // the chain must not touch the slit
        for &id in &e.chain {
            let c = &w.cubes()[id as usize];
            for bs in d.segments().iter().filter(|s| s.is_slit()) {
                assert!(bs.seg.sup_dist_rect(&c.cube.rect()).0 > 0.0);
            }
        }
        assert!(e.certified_lower <= e.upper);
    }

    #[test]
    fn near_regime_matches_lemma_constant() {
        let d = gallery::unit_square();
        let w = WhitneyDecomposition::build(&d, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &alpha in &[0.4, 1.0] {
            let ms = MetricSpace::new(&d, &w, AlphaParam::new(alpha).unwrap());
            let mut tested = 0;
            while tested < 30 {
                let x = Point::new(0.1 + 0.8 * rng.gen::<f64>(), 0.1 + 0.8 * rng.gen::<f64>());
                let dx = d.boundary_dist_raw(x);
                let y = Point::new(
                    x.x + (rng.gen::<f64>() - 0.5) * dx,
                    x.y + (rng.gen::<f64>() - 0.5) * dx,
                );
                if !d.contains_interior(y) || w.locate(y).is_none() || w.locate(x).is_none() {
                    continue;
                }
                let dy = d.boundary_dist_raw(y);
                let sep = x.sup_dist(y);
                if sep == 0.0 || sep >= dx.min(dy) {
                    continue;
                }
                let e = ms.d_tilde(x, y).unwrap();
                let bound = (1.0 + 1.0 / alpha) * sep.powf(alpha);
                assert!(e.upper <= bound * (1.0 + 1e-6), "{} > {}", e.upper, bound);
                assert!(e.upper + 1e-12 >= sep.powf(alpha));
                tested += 1;
            }
        }
    }

    #[test]
    fn chain_sum_triangle_inequality() {
        let d = gallery::slit_square();
        let w = WhitneyDecomposition::build(&d, 6).unwrap();
        let ms = MetricSpace::new(&d, &w, AlphaParam::new(0.5).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pts = Vec::new();
        while pts.len() < 60 {
            let p = Point::new(-1.0 + 2.0 * rng.gen::<f64>(), -1.0 + 2.0 * rng.gen::<f64>());
            if d.contains_interior(p) && w.locate(p).is_some() {
                pts.push(p);
            }
        }
        for tri in pts.chunks(3).take(20) {
            let (x, y, z) = (tri[0], tri[1], tri[2]);
            let dxz = ms.d_alpha(x, z).unwrap();
            let dxy = ms.d_alpha(x, y).unwrap();
            let dyz = ms.d_alpha(y, z).unwrap();
            let qy = w.locate(y).unwrap();
            let slack = ms.cube_weight(qy);
            assert!(
                dxz.chain_sum <= dxy.chain_sum + dyz.chain_sum + slack + 1e-12,
                "triangle violated"
            );
        }
    }

    #[test]
    fn alpha_monotonicity_on_chains() {
        let d = gallery::slit_square();
        let w = WhitneyDecomposition::build(&d, 7).unwrap();
        let a_hi = AlphaParam::new(0.8).unwrap();
        let a_lo = AlphaParam::new(0.3).unwrap();
        let ms_hi = MetricSpace::new(&d, &w, a_hi);
        let ms_lo = MetricSpace::new(&d, &w, a_lo);
        let x = Point::new(-0.7, 0.4);
        let y = Point::new(0.6, -0.5);
        let chain = ms_hi.best_chain(x, y).unwrap();
        let max_diam = chain
            .iter()
            .map(|&id| w.cubes()[id as usize].diam())
            .fold(0.0f64, f64::max);
        assert!(max_diam <= 1.0, "test needs diams <= 1");
        let hi = ms_hi.chain_cost(&chain);
        let lo = ms_lo.chain_cost(&chain);
        assert!(
            hi <= lo * max_diam.powf(a_hi.value() - a_lo.value()) + 1e-12,
            "{hi} vs {lo}"
        );
    }

    #[test]
    fn refinement_does_not_increase_upper() {
        let d = gallery::slit_square();
        let pairs = [
            (Point::new(0.0, 0.1), Point::new(0.0, -0.1)),
            (Point::new(-0.8, 0.8), Point::new(0.8, -0.8)),
            (Point::new(0.3, 0.5), Point::new(0.7, 0.5)),
        ];
        let mut prev: Vec<f64> = vec![f64::INFINITY; pairs.len()];
        for depth in 6..=8 {
            let w = WhitneyDecomposition::build(&d, depth).unwrap();
            let ms = MetricSpace::new(&d, &w, AlphaParam::new(0.5).unwrap());
            for (k, &(x, y)) in pairs.iter().enumerate() {
                let e = ms.d_tilde(x, y).unwrap();
                assert!(
                    e.upper <= prev[k] * 1.05,
                    "depth {depth} pair {k}: {} vs {}",
                    e.upper,
                    prev[k]
                );
                prev[k] = e.upper;
            }
        }
    }

    #[test]
    fn deficit_point_rejected() {
        let d = gallery::unit_square();
        let w = WhitneyDecomposition::build(&d, 5).unwrap();
        let ms = MetricSpace::new(&d, &w, AlphaParam::new(0.5).unwrap());
        let r = ms.d_alpha(Point::new(1e-6, 1e-6), Point::new(0.5, 0.5));
        assert!(matches!(r, Err(Error::DeficitRegion(..))));
    }

    #[test]
    fn touch_point_of_neighbors() {
        let a = Rect::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        let b = Rect::new(Point::new(1.0, 0.0), Point::new(2.0, 1.0));
        let t = touch_point(a, b);
        assert_abs_diff_eq!(t.x, 1.0);
        assert_abs_diff_eq!(t.y, 0.5);
    }

    #[test]
    fn alpha_param_validation() {
        assert!(AlphaParam::new(0.0).is_err());
        assert!(AlphaParam::new(1.5).is_err());
        let a = AlphaParam::from_exponent(4.0, 2).unwrap();
        assert_abs_diff_eq!(a.value(), 2.0 / 3.0);
        assert!(AlphaParam::from_exponent(2.0, 2).is_err());
    }
}
