//! Planar domains with distance-to-boundary and containment queries.
//!
//! A domain is an open connected subset of the plane described by one of
//! three payloads: a polygon with holes and slits, a union of axis-aligned
//! boxes, or an occupancy grid. All payloads are reduced to a common boundary
//! representation (a list of tagged segments) over which every query is
//! evaluated exactly; a bucket grid accelerates the segment searches.
//!
//! Slits are closed segments removed from the open region. A point on a slit
//! is a boundary point with two sides, so boundary locations are reported as
//! a point plus a [`FaceTag`] identifying the segment and the side hit.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::primitives::{
    convex_hull, cross, seg_seg_intersection, Cube, Point, Rect, SegSegIntersection, Segment,
};
use crate::{Error, Result};

/// Which side of a boundary segment an approach came from. `Plus` is the side
/// the left normal of `a -> b` points into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

/// Identifies a boundary segment and the side it was approached from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceTag {
    pub segment: u32,
    pub side: Side,
}

impl fmt::Display for FaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seg{}{}",
            self.segment,
            match self.side {
                Side::Plus => "+",
                Side::Minus => "-",
            }
        )
    }
}

/// Role of a boundary segment within the domain description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegKind {
    Outer,
    Hole(u32),
    /// Zero-thickness segment removed from the open region; both sides are
    /// distinct boundary faces.
    Slit(u32),
}

#[derive(Clone, Debug)]
pub struct BoundarySegment {
    pub seg: Segment,
    pub kind: SegKind,
}

impl BoundarySegment {
    pub fn is_slit(&self) -> bool {
        matches!(self.kind, SegKind::Slit(_))
    }
}

/// Bucket grid over the boundary segments. Queries may visit a segment more
/// than once; all uses are idempotent (min / any).
struct SegmentGrid {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentGrid {
    fn build(segments: &[BoundarySegment], bbox: &Rect) -> Self {
        let side = bbox.max_side().max(1e-30);
        let cell = side / 96.0;
        let padded = bbox.inflate(2.0 * cell);
        let nx = ((padded.width() / cell).ceil() as usize).max(1);
        let ny = ((padded.height() / cell).ceil() as usize).max(1);
        let mut grid = SegmentGrid {
            origin: padded.lo,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (id, bs) in segments.iter().enumerate() {
            let bb = bs.seg.bbox();
            let (i0, j0) = grid.cell_of(bb.lo);
            let (i1, j1) = grid.cell_of(bb.hi);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let rect = grid.bucket_rect(i, j);
                    if bs.seg.sup_dist_rect(&rect).0 <= 1e-12 * side {
                        grid.buckets[j * nx + i].push(id as u32);
                    }
                }
            }
        }
        grid
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let i = ((p.x - self.origin.x) / self.cell).floor() as i64;
        let j = ((p.y - self.origin.y) / self.cell).floor() as i64;
        (
            i.clamp(0, self.nx as i64 - 1) as usize,
            j.clamp(0, self.ny as i64 - 1) as usize,
        )
    }

    fn bucket_rect(&self, i: usize, j: usize) -> Rect {
        let lo = Point::new(
            self.origin.x + i as f64 * self.cell,
            self.origin.y + j as f64 * self.cell,
        );
        Rect::new(lo, Point::new(lo.x + self.cell, lo.y + self.cell))
    }

    /// Visit segment ids in buckets overlapping `rect` inflated by `pad`.
    fn for_each_near_rect(&self, rect: &Rect, pad: f64, mut f: impl FnMut(u32)) {
        let (i0, j0) = self.cell_of(Point::new(rect.lo.x - pad, rect.lo.y - pad));
        let (i1, j1) = self.cell_of(Point::new(rect.hi.x + pad, rect.hi.y + pad));
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &id in &self.buckets[j * self.nx + i] {
                    f(id);
                }
            }
        }
    }

    /// Minimum of `dist(seg)` over segments, searched only out to `radius`;
    /// `None` when no segment comes that close. Early exit keeps point
    /// classification cheap deep inside the domain.
    fn min_dist_within(
        &self,
        query_bbox: &Rect,
        radius: f64,
        mut dist: impl FnMut(u32) -> f64,
    ) -> Option<f64> {
        let (ci0, cj0) = self.cell_of(query_bbox.lo);
        let (ci1, cj1) = self.cell_of(query_bbox.hi);
        let max_ring = (radius / self.cell).ceil() as usize + 2;
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            let lo_i = ci0 as i64 - ring as i64;
            let hi_i = ci1 as i64 + ring as i64;
            let lo_j = cj0 as i64 - ring as i64;
            let hi_j = cj1 as i64 + ring as i64;
            let mut visit = |i: i64, j: i64, best: &mut f64| {
                if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                    return;
                }
                for &id in &self.buckets[j as usize * self.nx + i as usize] {
                    let d = dist(id);
                    if d < *best {
                        *best = d;
                    }
                }
            };
            if ring == 0 {
                for j in lo_j..=hi_j {
                    for i in lo_i..=hi_i {
                        visit(i, j, &mut best);
                    }
                }
            } else {
                for i in lo_i..=hi_i {
                    visit(i, lo_j, &mut best);
                    visit(i, hi_j, &mut best);
                }
                for j in (lo_j + 1)..hi_j {
                    visit(lo_i, j, &mut best);
                    visit(hi_i, j, &mut best);
                }
            }
            let ring_bound = (ring as f64 - 1.0) * self.cell;
            if ring_bound > radius || ring_bound > best {
                break;
            }
        }
        (best <= radius).then_some(best)
    }

    /// Like the full ring search but starts at the ring a known lower bound
    /// permits; no segment may be closer than `at_least`.
    fn nearest_from(
        &self,
        query_bbox: &Rect,
        at_least: f64,
        mut dist: impl FnMut(u32) -> f64,
    ) -> (f64, u32) {
        let (ci0, cj0) = self.cell_of(query_bbox.lo);
        let (ci1, cj1) = self.cell_of(query_bbox.hi);
        // A segment occupying a bucket of ring r has a point within
        // (r + 1) * cell of the query, so with a valid lower bound the rings
        // below (at_least / cell - 2) are provably empty of candidates.
        let start = ((at_least / self.cell).floor() as usize).saturating_sub(2);
        let mut best = f64::INFINITY;
        let mut best_id = u32::MAX;
        let max_ring = self.nx.max(self.ny) * 2 + 2;
        for ring in start..=max_ring {
            let lo_i = ci0 as i64 - ring as i64;
            let hi_i = ci1 as i64 + ring as i64;
            let lo_j = cj0 as i64 - ring as i64;
            let hi_j = cj1 as i64 + ring as i64;
            let mut visit = |i: i64, j: i64, best: &mut f64, best_id: &mut u32| {
                if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                    return;
                }
                for &id in &self.buckets[j as usize * self.nx + i as usize] {
                    let d = dist(id);
                    if d < *best {
                        *best = d;
                        *best_id = id;
                    }
                }
            };
            if ring == 0 {
                for j in lo_j..=hi_j {
                    for i in lo_i..=hi_i {
                        visit(i, j, &mut best, &mut best_id);
                    }
                }
            } else {
                for i in lo_i..=hi_i {
                    visit(i, lo_j, &mut best, &mut best_id);
                    visit(i, hi_j, &mut best, &mut best_id);
                }
                for j in (lo_j + 1)..hi_j {
                    visit(lo_i, j, &mut best, &mut best_id);
                    visit(hi_i, j, &mut best, &mut best_id);
                }
            }
            if (ring as f64 - 1.0) * self.cell > best {
                break;
            }
        }
        (best, best_id)
    }

    /// Expanding ring search: find the minimum of `dist(seg)` over all
    /// segments. Returns the best value and every candidate id whose distance
    /// is within `tie_tol` of it.
    fn nearest(
        &self,
        query_bbox: &Rect,
        tie_tol: f64,
        mut dist: impl FnMut(u32) -> f64,
    ) -> (f64, Vec<u32>) {
        let (ci0, cj0) = self.cell_of(query_bbox.lo);
        let (ci1, cj1) = self.cell_of(query_bbox.hi);
        let mut best = f64::INFINITY;
        let mut cands: Vec<(f64, u32)> = Vec::new();
        let max_ring = self.nx.max(self.ny);
        let mut ring = 0usize;
        loop {
            let mut visited_any = false;
            let lo_i = ci0 as i64 - ring as i64;
            let hi_i = ci1 as i64 + ring as i64;
            let lo_j = cj0 as i64 - ring as i64;
            let hi_j = cj1 as i64 + ring as i64;
            let mut visit = |i: i64, j: i64, grid: &SegmentGrid, best: &mut f64,
                             cands: &mut Vec<(f64, u32)>| {
                if i < 0 || j < 0 || i >= grid.nx as i64 || j >= grid.ny as i64 {
                    return false;
                }
                for &id in &grid.buckets[j as usize * grid.nx + i as usize] {
                    let d = dist(id);
                    if d < *best {
                        *best = d;
                    }
                    if d.is_finite() {
                        cands.push((d, id));
                    }
                }
                true
            };
            if ring == 0 {
                for j in lo_j..=hi_j {
                    for i in lo_i..=hi_i {
                        visited_any |= visit(i, j, self, &mut best, &mut cands);
                    }
                }
            } else {
                for i in lo_i..=hi_i {
                    visited_any |= visit(i, lo_j, self, &mut best, &mut cands);
                    visited_any |= visit(i, hi_j, self, &mut best, &mut cands);
                }
                for j in (lo_j + 1)..hi_j {
                    visited_any |= visit(lo_i, j, self, &mut best, &mut cands);
                    visited_any |= visit(hi_i, j, self, &mut best, &mut cands);
                }
            }
            // Buckets on ring r are at least (r-1) cells away from the query.
            let ring_bound = (ring as f64 - 1.0) * self.cell;
            if (best.is_finite() && ring_bound > best + tie_tol) || (ring > max_ring && !visited_any)
            {
                break;
            }
            if ring > 2 * max_ring {
                break;
            }
            ring += 1;
        }
        cands.retain(|&(d, _)| d <= best + tie_tol);
        cands.sort_by(|a, b| a.1.cmp(&b.1));
        cands.dedup_by_key(|c| c.1);
        (best, cands.into_iter().map(|(_, id)| id).collect())
    }
}

/// Geometry payload of a [`Domain`].
pub enum DomainKind {
    Polygon {
        outer: Vec<Point>,
        holes: Vec<Vec<Point>>,
        slits: Vec<Segment>,
    },
    BoxUnion {
        boxes: Vec<Rect>,
    },
    Grid {
        origin: Point,
        cell: f64,
        nx: usize,
        ny: usize,
        /// Row-major, row 0 at the bottom.
        cells: Vec<bool>,
        /// Chessboard distance transform in cells (0 outside).
        dist_cells: Vec<u32>,
    },
}

/// An open connected planar region with exact boundary queries.
pub struct Domain {
    name: String,
    kind: DomainKind,
    segments: Vec<BoundarySegment>,
    grid: SegmentGrid,
    bbox: Rect,
    eps: f64,
    basepoint: Point,
    components: usize,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain")
            .field("name", &self.name)
            .field("segments", &self.segments.len())
            .field("bbox", &self.bbox)
            .finish()
    }
}

impl Domain {
    pub fn polygon(
        name: &str,
        outer: Vec<Point>,
        holes: Vec<Vec<Point>>,
        slits: Vec<Segment>,
    ) -> Result<Domain> {
        if outer.len() < 3 {
            return Err(Error::InvalidInput("outer ring needs at least 3 vertices".into()));
        }
        let mut segments = Vec::new();
        let ring_edges = |ring: &[Point], out: &mut Vec<Segment>| {
            for i in 0..ring.len() {
                out.push(Segment::new(ring[i], ring[(i + 1) % ring.len()]));
            }
        };
        let mut outer_edges = Vec::new();
        ring_edges(&outer, &mut outer_edges);
        segments.extend(outer_edges.into_iter().map(|seg| BoundarySegment {
            seg,
            kind: SegKind::Outer,
        }));
        for (hi, hole) in holes.iter().enumerate() {
            if hole.len() < 3 {
                return Err(Error::InvalidInput(format!("hole {hi} needs at least 3 vertices")));
            }
            let mut edges = Vec::new();
            ring_edges(hole, &mut edges);
            segments.extend(edges.into_iter().map(|seg| BoundarySegment {
                seg,
                kind: SegKind::Hole(hi as u32),
            }));
        }
        for (si, &slit) in slits.iter().enumerate() {
            if slit.sup_len() <= 0.0 {
                return Err(Error::InvalidInput(format!("slit {si} is degenerate")));
            }
            segments.push(BoundarySegment {
                seg: slit,
                kind: SegKind::Slit(si as u32),
            });
        }
        Self::finish(name, DomainKind::Polygon { outer, holes, slits }, segments)
    }

    pub fn box_union(name: &str, boxes: Vec<Rect>) -> Result<Domain> {
        if boxes.is_empty() {
            return Err(Error::InvalidInput("box union needs at least one box".into()));
        }
        let segments = box_union_boundary(&boxes);
        Self::finish(name, DomainKind::BoxUnion { boxes }, segments)
    }

    /// Occupancy grid. `rows[0]` is the top row; cells are squares of side
    /// `cell` and the lower-left corner of the grid sits at the origin.
    pub fn grid(name: &str, cell: f64, rows: &[String]) -> Result<Domain> {
        if rows.is_empty() || cell <= 0.0 {
            return Err(Error::InvalidInput("grid needs rows and a positive cell size".into()));
        }
        let ny = rows.len();
        let nx = rows[0].len();
        if nx == 0 || rows.iter().any(|r| r.len() != nx) {
            return Err(Error::InvalidInput("grid rows must be non-empty and equal length".into()));
        }
        let mut cells = vec![false; nx * ny];
        for (r, row) in rows.iter().enumerate() {
            for (i, ch) in row.chars().enumerate() {
                let v = match ch {
                    '1' => true,
                    '0' => false,
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "grid rows must be bitstrings, found {ch:?}"
                        )))
                    }
                };
                // rows come top-down, store bottom-up
                cells[(ny - 1 - r) * nx + i] = v;
            }
        }
        let dist_cells = chessboard_transform(&cells, nx, ny);
        let segments = grid_boundary(&cells, nx, ny, cell);
        Self::finish(
            name,
            DomainKind::Grid {
                origin: Point::new(0.0, 0.0),
                cell,
                nx,
                ny,
                cells,
                dist_cells,
            },
            segments,
        )
    }

    fn finish(name: &str, kind: DomainKind, segments: Vec<BoundarySegment>) -> Result<Domain> {
        if segments.is_empty() {
            return Err(Error::InvalidInput("domain has no boundary".into()));
        }
        let mut bbox = Rect::new(
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for bs in &segments {
            let bb = bs.seg.bbox();
            bbox.lo.x = bbox.lo.x.min(bb.lo.x);
            bbox.lo.y = bbox.lo.y.min(bb.lo.y);
            bbox.hi.x = bbox.hi.x.max(bb.hi.x);
            bbox.hi.y = bbox.hi.y.max(bb.hi.y);
        }
        let grid = SegmentGrid::build(&segments, &bbox);
        let eps = 1e-12 * bbox.max_side();
        let mut domain = Domain {
            name: name.to_string(),
            kind,
            segments,
            grid,
            bbox,
            eps,
            basepoint: bbox.center(),
            components: 0,
        };
        domain.components = domain.component_count(384);
        if domain.components != 1 {
            // Thin channels can fall below the coarse resolution; retry fine.
            domain.components = domain.component_count(2048);
        }
        if domain.components == 0 {
            return Err(Error::EmptyDomain(2048));
        }
        if domain.components != 1 {
            return Err(Error::Disconnected {
                components: domain.components,
                resolution: 2048,
            });
        }
        domain.basepoint = domain.default_basepoint();
        Ok(domain)
    }

    pub fn with_basepoint(mut self, p: Point) -> Self {
        debug_assert!(self.contains_interior(p), "basepoint must be interior");
        self.basepoint = p;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn bbox(&self) -> Rect {
        self.bbox
    }

    /// Tolerance used for point-on-boundary classification
    /// (1e-12 of the bounding-box diameter).
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// A fixed interior reference point (used e.g. as the reachability
    /// basepoint for inaccessibility detection).
    pub fn basepoint(&self) -> Point {
        self.basepoint
    }

    pub fn segments(&self) -> &[BoundarySegment] {
        &self.segments
    }

    /// Number of connected components found by the build-time flood fill.
    pub fn components(&self) -> usize {
        self.components
    }

    /// Raw minimum sup-norm distance from `p` to the boundary segments,
    /// regardless of which side of the boundary `p` lies on.
    pub fn boundary_dist_raw(&self, p: Point) -> f64 {
        let bb = Rect::new(p, p);
        let (d, _) = self
            .grid
            .nearest(&bb, 0.0, |id| self.segments[id as usize].seg.sup_dist_point(p).0);
        d
    }

    /// Crude containment ignoring the boundary tolerance: parity for
    /// polygons, cell lookup for grids, box membership for unions.
    fn crude_inside(&self, p: Point) -> bool {
        match &self.kind {
            DomainKind::Polygon { outer, holes, .. } => {
                let mut crossings = 0u32;
                let mut count_ring = |ring: &Vec<Point>| {
                    for i in 0..ring.len() {
                        let a = ring[i];
                        let b = ring[(i + 1) % ring.len()];
                        if (a.y > p.y) != (b.y > p.y) {
                            let t = (p.y - a.y) / (b.y - a.y);
                            if a.x + t * (b.x - a.x) > p.x {
                                crossings += 1;
                            }
                        }
                    }
                };
                count_ring(outer);
                for h in holes {
                    count_ring(h);
                }
                crossings % 2 == 1
            }
            DomainKind::BoxUnion { boxes } => boxes.iter().any(|b| b.contains(p)),
            DomainKind::Grid {
                origin,
                cell,
                nx,
                ny,
                cells,
                ..
            } => {
                let i = ((p.x - origin.x) / cell).floor() as i64;
                let j = ((p.y - origin.y) / cell).floor() as i64;
                if i < 0 || j < 0 || i >= *nx as i64 || j >= *ny as i64 {
                    return false;
                }
                cells[j as usize * nx + i as usize]
            }
        }
    }

    /// Is `p` strictly inside the open domain (further than `eps` from the
    /// boundary)?
    pub fn contains_interior(&self, p: Point) -> bool {
        if !self.crude_inside(p) {
            return false;
        }
        let bb = Rect::new(p, p);
        self.grid
            .min_dist_within(&bb, self.eps, |id| {
                self.segments[id as usize].seg.sup_dist_point(p).0
            })
            .is_none()
    }

    /// Minimum boundary distance if it is at most `radius`, else `None`.
    pub fn boundary_dist_within(&self, p: Point, radius: f64) -> Option<f64> {
        let bb = Rect::new(p, p);
        self.grid.min_dist_within(&bb, radius, |id| {
            self.segments[id as usize].seg.sup_dist_point(p).0
        })
    }

    /// Exact boundary distance given a certified lower bound `at_least`
    /// (for example the cube distance of a Whitney cube containing `p`).
    /// The ring search skips buckets that the bound rules out.
    pub fn boundary_dist_from(&self, p: Point, at_least: f64) -> f64 {
        let bb = Rect::new(p, p);
        let (d, _) = self.grid.nearest_from(&bb, at_least, |id| {
            self.segments[id as usize].seg.sup_dist_point(p).0
        });
        d
    }

    /// Sup-norm distance from an interior point to the boundary. Points
    /// within `eps` of the boundary return 0; points outside the closure are
    /// an error.
    pub fn dist_to_boundary(&self, p: Point) -> Result<f64> {
        let d = self.boundary_dist_raw(p);
        if d <= self.eps {
            return Ok(0.0);
        }
        if !self.crude_inside(p) {
            return Err(Error::OutsideDomain(p.x, p.y));
        }
        Ok(d)
    }

    /// Distance-transform lookup for grid domains (accuracy: one cell).
    /// Falls back to the exact segment distance for the other kinds.
    pub fn coarse_dist(&self, p: Point) -> f64 {
        if let DomainKind::Grid {
            origin,
            cell,
            nx,
            ny,
            dist_cells,
            ..
        } = &self.kind
        {
            let i = ((p.x - origin.x) / cell).floor() as i64;
            let j = ((p.y - origin.y) / cell).floor() as i64;
            if i < 0 || j < 0 || i >= *nx as i64 || j >= *ny as i64 {
                return 0.0;
            }
            let steps = dist_cells[j as usize * nx + i as usize];
            (steps as f64 - 0.5).max(0.0) * cell
        } else {
            self.boundary_dist_raw(p)
        }
    }

    /// Nearest boundary point with its face tag, seen from `p`. Ties are
    /// broken by lowest face index, then lexicographic point order.
    pub fn nearest_boundary(&self, p: Point) -> (f64, Point, FaceTag) {
        let bb = Rect::new(p, p);
        let (best, cands) = self
            .grid
            .nearest(&bb, self.eps, |id| self.segments[id as usize].seg.sup_dist_point(p).0);
        let mut choice: Option<(u32, Point)> = None;
        for id in cands {
            let (_, t) = self.segments[id as usize].seg.sup_dist_point(p);
            let q = self.segments[id as usize].seg.eval(t);
            let better = match &choice {
                None => true,
                Some((cid, cq)) => {
                    id < *cid
                        || (id == *cid && (q.x, q.y) < (cq.x, cq.y))
                }
            };
            if better {
                choice = Some((id, q));
            }
        }
        let (id, q) = choice.expect("domain has boundary segments");
        (best, q, self.face_tag(id, p))
    }

    /// Nearest boundary point to a closed rectangle (a cube), with the same
    /// deterministic tie-breaking. The side of the face tag is decided by the
    /// rectangle center.
    pub fn nearest_boundary_rect(&self, rect: &Rect) -> (f64, Point, FaceTag) {
        let (best, cands) = self
            .grid
            .nearest(rect, self.eps, |id| self.segments[id as usize].seg.sup_dist_rect(rect).0);
        let mut choice: Option<(u32, Point)> = None;
        for id in cands {
            let (_, t) = self.segments[id as usize].seg.sup_dist_rect(rect);
            let q = self.segments[id as usize].seg.eval(t);
            let better = match &choice {
                None => true,
                Some((cid, cq)) => id < *cid || (id == *cid && (q.x, q.y) < (cq.x, cq.y)),
            };
            if better {
                choice = Some((id, q));
            }
        }
        let (id, q) = choice.expect("domain has boundary segments");
        (best, q, self.face_tag(id, rect.center()))
    }

    /// Face tag for segment `id` approached from `probe`.
    pub fn face_tag(&self, id: u32, probe: Point) -> FaceTag {
        let s = &self.segments[id as usize].seg;
        let side = if cross(s.a, s.b, probe) >= 0.0 {
            Side::Plus
        } else {
            Side::Minus
        };
        FaceTag { segment: id, side }
    }

    /// Smallest distance from `rect` to the boundary, exact over segments.
    pub fn rect_boundary_dist(&self, rect: &Rect) -> f64 {
        let (d, _) = self
            .grid
            .nearest(rect, 0.0, |id| self.segments[id as usize].seg.sup_dist_rect(rect).0);
        d
    }

    /// Does any boundary segment touch the closed rectangle?
    pub fn rect_touches_boundary(&self, rect: &Rect) -> bool {
        let mut touched = false;
        self.grid.for_each_near_rect(rect, 0.0, |id| {
            if !touched && self.segments[id as usize].seg.sup_dist_rect(rect).0 <= 0.0 {
                touched = true;
            }
        });
        touched
    }

    /// Is the segment from `a` to `b` contained in the open domain?
    /// With `exclude_a` the test is for the semi-open segment `(a, b]`, so
    /// touching the boundary exactly at `a` is allowed.
    pub fn segment_in_domain(&self, a: Point, b: Point, exclude_a: bool) -> bool {
        let tol = self.touch_tol();
        if !self.contains_interior(b) {
            return false;
        }
        if !exclude_a && !self.contains_interior(a) {
            return false;
        }
        let query = Segment::new(a, b);
        let mut ok = true;
        self.grid.for_each_near_rect(&query.bbox(), tol, |id| {
            if !ok {
                return;
            }
            match seg_seg_intersection(&self.segments[id as usize].seg, &query, self.eps) {
                SegSegIntersection::None => {}
                SegSegIntersection::At(p) => {
                    if !(exclude_a && p.sup_dist(a) <= tol) {
                        ok = false;
                    }
                }
                SegSegIntersection::Overlap(p, q) => {
                    if !(exclude_a && p.sup_dist(a) <= tol && q.sup_dist(a) <= tol) {
                        ok = false;
                    }
                }
            }
        });
        ok
    }

    /// Tolerance for "touches exactly at the allowed point" decisions.
    fn touch_tol(&self) -> f64 {
        1e-9 * self.bbox.max_side()
    }

    /// Is `x` Q-visible in the domain: does every semi-open segment `(x, y]`,
    /// `y` in the cube, lie in the open region? Equivalently the convex hull
    /// of the cube and `x`, minus `x` itself, stays inside. Exact in 2-D: the
    /// hull is clipped against every boundary segment.
    pub fn is_q_visible(&self, q: &Cube, x: Point) -> bool {
        let tol = self.touch_tol();
        if !self.contains_interior(q.center) {
            return false;
        }
        let mut pts = q.corners().to_vec();
        pts.push(x);
        let hull = convex_hull(&pts);
        if hull.len() < 3 {
            return false;
        }
        let hull_bbox = Rect::from_points(hull.iter());
        let mut visible = true;
        self.grid.for_each_near_rect(&hull_bbox, tol, |id| {
            if !visible {
                return;
            }
            if let Some((p0, p1)) = clip_segment_to_convex(&self.segments[id as usize].seg, &hull) {
                let allowed = p0.sup_dist(x) <= tol && p1.sup_dist(x) <= tol;
                if !allowed {
                    visible = false;
                }
            }
        });
        visible
    }

    /// Q-visibility of a tagged boundary point. On top of [`is_q_visible`],
    /// a point in the relative interior of a slit must be approached from the
    /// tagged side; at slit endpoints (tips) both sides are legitimate.
    pub fn is_q_visible_sided(&self, q: &Cube, x: Point, face: FaceTag) -> bool {
        if !self.is_q_visible(q, x) {
            return false;
        }
        let bs = &self.segments[face.segment as usize];
        if !bs.is_slit() {
            return true;
        }
        let tol = self.touch_tol();
        if x.sup_dist(bs.seg.a) <= tol || x.sup_dist(bs.seg.b) <= tol {
            return true; // tip: approaches can wrap around the endpoint
        }
        // Hull passed the exact test, so it lies on one side of the slit
        // locally; the cube center is a representative of that side.
        let side = if cross(bs.seg.a, bs.seg.b, q.center) >= 0.0 {
            Side::Plus
        } else {
            Side::Minus
        };
        side == face.side
    }

    /// Flood-fill component count at the given grid resolution. A cell
    /// participates when no boundary segment touches it and its center lies
    /// inside.
    pub fn component_count(&self, resolution: usize) -> usize {
        if let DomainKind::Grid { nx, ny, cells, .. } = &self.kind {
            return grid_components(cells, *nx, *ny);
        }
        let res = resolution.max(8);
        let side = self.bbox.max_side();
        let h = side / res as f64;
        let nx = (self.bbox.width() / h).ceil() as usize + 1;
        let ny = (self.bbox.height() / h).ceil() as usize + 1;
        let mut open = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let lo = Point::new(
                    self.bbox.lo.x + i as f64 * h,
                    self.bbox.lo.y + j as f64 * h,
                );
                let rect = Rect::new(lo, Point::new(lo.x + h, lo.y + h));
                if !self.rect_touches_boundary(&rect) && self.crude_inside(rect.center()) {
                    open[j * nx + i] = true;
                }
            }
        }
        grid_components(&open, nx, ny)
    }

    fn default_basepoint(&self) -> Point {
        // deepest interior point on a coarse scan
        let mut best = (f64::NEG_INFINITY, self.bbox.center());
        let n = 48;
        for j in 0..n {
            for i in 0..n {
                let p = Point::new(
                    self.bbox.lo.x + (i as f64 + 0.5) * self.bbox.width() / n as f64,
                    self.bbox.lo.y + (j as f64 + 0.5) * self.bbox.height() / n as f64,
                );
                if self.crude_inside(p) {
                    let d = self.boundary_dist_raw(p);
                    if d > best.0 {
                        best = (d, p);
                    }
                }
            }
        }
        best.1
    }

    pub fn from_json_str(name: &str, text: &str) -> Result<Domain> {
        let spec: DomainSpec = serde_json::from_str(text)?;
        spec.build(name)
    }

    pub fn from_file(path: &Path) -> Result<Domain> {
        let text = std::fs::read_to_string(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "domain".to_string());
        Self::from_json_str(&name, &text)
    }
}

/// Clip a segment against a counter-clockwise convex polygon; returns the
/// clipped sub-segment endpoints if the intersection is non-empty.
fn clip_segment_to_convex(seg: &Segment, hull: &[Point]) -> Option<(Point, Point)> {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let d = seg.b - seg.a;
    for i in 0..hull.len() {
        let e0 = hull[i];
        let e1 = hull[(i + 1) % hull.len()];
        let n = Point::new(-(e1.y - e0.y), e1.x - e0.x); // inward normal for CCW
        let denom = n.x * d.x + n.y * d.y;
        let num = n.x * (e0.x - seg.a.x) + n.y * (e0.y - seg.a.y);
        if denom.abs() < 1e-300 {
            // parallel: inside the half-plane iff n . (a - e0) >= 0
            if num > 0.0 {
                return None;
            }
            continue;
        }
        let t = num / denom;
        if denom > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((seg.eval(t0), seg.eval(t1)))
}

fn grid_components(open: &[bool], nx: usize, ny: usize) -> usize {
    let mut seen = vec![false; open.len()];
    let mut count = 0usize;
    let mut stack = Vec::new();
    for start in 0..open.len() {
        if !open[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx % nx, idx / nx);
            let push = |ii: i64, jj: i64, stack: &mut Vec<usize>, seen: &mut Vec<bool>| {
                if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                    return;
                }
                let n = jj as usize * nx + ii as usize;
                if open[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            push(i as i64 - 1, j as i64, &mut stack, &mut seen);
            push(i as i64 + 1, j as i64, &mut stack, &mut seen);
            push(i as i64, j as i64 - 1, &mut stack, &mut seen);
            push(i as i64, j as i64 + 1, &mut stack, &mut seen);
        }
    }
    count
}

/// Two-pass chessboard (sup-norm) distance transform: steps from each inside
/// cell to the nearest outside cell; outside cells hold 0.
fn chessboard_transform(cells: &[bool], nx: usize, ny: usize) -> Vec<u32> {
    let big = (nx + ny) as u32 + 2;
    let mut d: Vec<u32> = cells
        .iter()
        .map(|&c| if c { big } else { 0 })
        .collect();
    let at = |d: &Vec<u32>, i: i64, j: i64| -> u32 {
        if i < 0 || j < 0 || i >= nx as i64 || j >= ny as i64 {
            0
        } else {
            d[j as usize * nx + i as usize]
        }
    };
    for j in 0..ny as i64 {
        for i in 0..nx as i64 {
            let idx = j as usize * nx + i as usize;
            if d[idx] == 0 {
                continue;
            }
            let m = at(&d, i - 1, j)
                .min(at(&d, i, j - 1))
                .min(at(&d, i - 1, j - 1))
                .min(at(&d, i + 1, j - 1));
            d[idx] = d[idx].min(m + 1);
        }
    }
    for j in (0..ny as i64).rev() {
        for i in (0..nx as i64).rev() {
            let idx = j as usize * nx + i as usize;
            if d[idx] == 0 {
                continue;
            }
            let m = at(&d, i + 1, j)
                .min(at(&d, i, j + 1))
                .min(at(&d, i + 1, j + 1))
                .min(at(&d, i - 1, j + 1));
            d[idx] = d[idx].min(m + 1);
        }
    }
    d
}

/// Boundary segments of an occupancy grid: maximal runs of cell edges
/// between inside and outside cells.
fn grid_boundary(cells: &[bool], nx: usize, ny: usize, h: f64) -> Vec<BoundarySegment> {
    let inside = |i: i64, j: i64| -> bool {
        i >= 0 && j >= 0 && i < nx as i64 && j < ny as i64 && cells[j as usize * nx + i as usize]
    };
    let mut segs = Vec::new();
    // horizontal edges on gridlines y = k h
    for k in 0..=ny as i64 {
        let mut run_start: Option<i64> = None;
        for i in 0..=nx as i64 {
            let boundary = i < nx as i64 && inside(i, k - 1) != inside(i, k);
            match (boundary, run_start) {
                (true, None) => run_start = Some(i),
                (false, Some(s)) => {
                    segs.push(Segment::new(
                        Point::new(s as f64 * h, k as f64 * h),
                        Point::new(i as f64 * h, k as f64 * h),
                    ));
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    // vertical edges on gridlines x = k h
    for k in 0..=nx as i64 {
        let mut run_start: Option<i64> = None;
        for j in 0..=ny as i64 {
            let boundary = j < ny as i64 && inside(k - 1, j) != inside(k, j);
            match (boundary, run_start) {
                (true, None) => run_start = Some(j),
                (false, Some(s)) => {
                    segs.push(Segment::new(
                        Point::new(k as f64 * h, s as f64 * h),
                        Point::new(k as f64 * h, j as f64 * h),
                    ));
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    segs
        .into_iter()
        .map(|seg| BoundarySegment {
            seg,
            kind: SegKind::Outer,
        })
        .collect()
}

/// Boundary of a union of closed axis-aligned boxes: each box edge minus the
/// portions interior to the union.
fn box_union_boundary(boxes: &[Rect]) -> Vec<BoundarySegment> {
    let mut segs: Vec<Segment> = Vec::new();
    let eps = boxes
        .iter()
        .map(|b| b.max_side())
        .fold(0.0f64, f64::max)
        * 1e-12;
    for (bi, b) in boxes.iter().enumerate() {
        // (vertical?, line coordinate, span lo, span hi, which side is interior probe)
        let edges = [
            (false, b.lo.y, b.lo.x, b.hi.x), // bottom
            (false, b.hi.y, b.lo.x, b.hi.x), // top
            (true, b.lo.x, b.lo.y, b.hi.y),  // left
            (true, b.hi.x, b.lo.y, b.hi.y),  // right
        ];
        for (vertical, line, lo, hi) in edges {
            // intervals of the edge covered by other boxes
            let mut covered: Vec<(f64, f64)> = Vec::new();
            for (oi, o) in boxes.iter().enumerate() {
                if oi == bi {
                    continue;
                }
                let (o_line_lo, o_line_hi, o_span_lo, o_span_hi) = if vertical {
                    (o.lo.x, o.hi.x, o.lo.y, o.hi.y)
                } else {
                    (o.lo.y, o.hi.y, o.lo.x, o.hi.x)
                };
                // the edge line must be inside (or on the far face of) box o
                if line > o_line_lo - eps && line < o_line_hi + eps {
                    let a = o_span_lo.max(lo);
                    let c = o_span_hi.min(hi);
                    if c > a + eps {
                        covered.push((a, c));
                    }
                }
            }
            covered.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            let mut cursor = lo;
            let emit = |from: f64, to: f64, segs: &mut Vec<Segment>| {
                if to > from + eps {
                    let (a, b) = if vertical {
                        (Point::new(line, from), Point::new(line, to))
                    } else {
                        (Point::new(from, line), Point::new(to, line))
                    };
                    segs.push(Segment::new(a, b));
                }
            };
            for (a, c) in covered {
                emit(cursor, a.min(hi), &mut segs);
                cursor = cursor.max(c);
                if cursor >= hi {
                    break;
                }
            }
            emit(cursor, hi, &mut segs);
        }
    }
    segs
        .into_iter()
        .map(|seg| BoundarySegment {
            seg,
            kind: SegKind::Outer,
        })
        .collect()
}

/// On-disk domain description.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    Polygon {
        outer: Vec<[f64; 2]>,
        #[serde(default)]
        holes: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        slits: Vec<[[f64; 2]; 2]>,
    },
    Grid {
        cell: f64,
        rows: Vec<String>,
    },
    BoxUnion {
        boxes: Vec<[[f64; 2]; 2]>,
    },
}

impl DomainSpec {
    pub fn build(self, name: &str) -> Result<Domain> {
        match self {
            DomainSpec::Polygon { outer, holes, slits } => Domain::polygon(
                name,
                outer.into_iter().map(|[x, y]| Point::new(x, y)).collect(),
                holes
                    .into_iter()
                    .map(|h| h.into_iter().map(|[x, y]| Point::new(x, y)).collect())
                    .collect(),
                slits
                    .into_iter()
                    .map(|[[x1, y1], [x2, y2]]| {
                        Segment::new(Point::new(x1, y1), Point::new(x2, y2))
                    })
                    .collect(),
            ),
            DomainSpec::Grid { cell, rows } => Domain::grid(name, cell, &rows),
            DomainSpec::BoxUnion { boxes } => Domain::box_union(
                name,
                boxes
                    .into_iter()
                    .map(|[[x1, y1], [x2, y2]]| {
                        Rect::new(Point::new(x1, y1), Point::new(x2, y2))
                    })
                    .collect(),
            ),
        }
    }
}
