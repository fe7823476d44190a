//! The alpha-boundary of a domain: boundary elements, agglutinated points and
//! the inaccessible set.
//!
//! A boundary element is one point of the completion boundary: a Euclidean
//! anchor on the boundary together with a canonical way of approaching it
//! from inside. Numerically an element is a cluster chain: at each scale
//! `delta_k` the Whitney cubes of diameter at most `delta_k` lying within
//! `delta_k` of the anchor are grouped by graph connectivity, and two groups
//! merge when the chain cost between them stays below
//! `merge_tol * delta_k^alpha`. The finest-scale merged groups are the
//! elements. An anchor carrying several elements is agglutinated (the two
//! faces of a slit); an anchor whose groups stay beyond the divergence guard
//! from a fixed interior basepoint at every scale is flagged inaccessible.

use std::collections::HashMap;

use serde::Serialize;

use crate::geometry::{Cube, Domain, FaceTag, Point, Rect};
use crate::metrics::{AlphaParam, MetricEstimate, MetricSpace, DIVERGENCE_GUARD};
use crate::whitney::WhitneyDecomposition;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct AlphaBoundaryConfig {
    /// Number of dyadic scales in the ladder (finest is tied to the
    /// decomposition depth).
    pub n_scales: usize,
    /// Two approach groups merge when their chain cost is below
    /// `merge_tol * delta^alpha`.
    pub merge_tol: f64,
    /// Boundary sample spacing; default is a quarter of the finest scale.
    pub sample_spacing: Option<f64>,
    /// Cap on the number of swept boundary samples (anchors always added).
    pub max_samples: usize,
    /// Extra sample points (snapped to the boundary).
    pub extra_samples: Vec<Point>,
}

impl Default for AlphaBoundaryConfig {
    fn default() -> Self {
        AlphaBoundaryConfig {
            n_scales: 5,
            merge_tol: 8.0,
            sample_spacing: None,
            max_samples: 4000,
            extra_samples: Vec::new(),
        }
    }
}

/// Cube ids forming one approach group at one scale.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleCluster {
    pub delta: f64,
    pub cubes: Vec<u32>,
}

/// One point of the alpha-boundary.
#[derive(Clone, Debug)]
pub struct BoundaryElement {
    pub id: usize,
    pub sample: usize,
    /// Euclidean anchor on the boundary.
    pub anchor: Point,
    pub face: FaceTag,
    /// Approach clusters, coarse to fine. Single-element samples store only
    /// the finest scale; agglutinated samples store the whole ladder.
    pub clusters: Vec<ScaleCluster>,
    /// Chain distance from the domain basepoint to the finest cluster
    /// (infinite when unreachable at the build resolution).
    pub reach: f64,
    /// The cluster wraps around a slit tip at the build resolution, so the
    /// element is approached from both sides of its face segment.
    pub two_sided: bool,
}

impl BoundaryElement {
    pub fn finest_cluster(&self) -> &ScaleCluster {
        self.clusters.last().expect("element has at least one cluster")
    }

    /// Representative cube at the given scale index (clamped to what is
    /// stored): the cluster cube nearest the anchor, lowest id on ties.
    pub fn representative(&self, w: &WhitneyDecomposition, scale_idx: usize) -> usize {
        let k = scale_idx.min(self.clusters.len() - 1);
        let cluster = &self.clusters[k];
        let mut best = (f64::INFINITY, u32::MAX);
        for &id in &cluster.cubes {
            let d = w.cubes()[id as usize].cube.rect().sup_dist_point(self.anchor);
            if (d, id) < best {
                best = (d, id);
            }
        }
        best.1 as usize
    }
}

#[derive(Clone, Debug)]
pub struct BoundarySample {
    pub point: Point,
    pub segment: u32,
    pub element_ids: Vec<usize>,
    /// Min chain distance from the basepoint per scale (coarse to fine).
    /// Accessible single-approach samples store only the finest entry.
    pub reach_ladder: Vec<f64>,
    pub inaccessible: bool,
}

/// Result of [`AlphaBoundary::element_metric`].
#[derive(Clone, Debug, Serialize)]
pub struct ElementMetric {
    pub d_tilde_c: MetricEstimate,
    pub rho_c: MetricEstimate,
    /// Chain estimates per scale, coarse to fine.
    pub ladder: Vec<f64>,
    /// Richardson extrapolation of the ladder.
    pub extrapolated_rho: f64,
    pub divergent: bool,
}

/// Either a boundary element or an interior point, for metric queries.
#[derive(Clone, Copy, Debug)]
pub enum MetricEndpoint {
    Element(usize),
    Interior(Point),
}

pub struct AlphaBoundary {
    pub alpha: AlphaParam,
    /// Dyadic scale ladder, coarse to fine.
    pub scales: Vec<f64>,
    samples: Vec<BoundarySample>,
    elements: Vec<BoundaryElement>,
    /// omega_{Q, alpha} per cube (u32::MAX when the approach was lost).
    element_of_cube: Vec<u32>,
    /// sample index of each cube's anchor.
    sample_of_cube: Vec<u32>,
    /// Chain distance from the basepoint cube to every cube.
    base_reach: Vec<f64>,
    basepoint_cube: usize,
    /// Quantized sample position -> sample index.
    position_index: HashMap<(i64, i64), usize>,
    quantum: f64,
    guard: f64,
}

impl AlphaBoundary {
    /// Construct the alpha-boundary on a decomposition. The decomposition
    /// must be at least `n_scales + 3` levels deep.
    pub fn build(
        domain: &Domain,
        whitney: &WhitneyDecomposition,
        alpha: AlphaParam,
        config: &AlphaBoundaryConfig,
    ) -> Result<AlphaBoundary> {
        let depth = whitney.depth_limit();
        let required = config.n_scales as u32 + 3;
        if depth < required {
            return Err(Error::InsufficientDepth { depth, required });
        }
        let side0 = whitney.root().diam();
        // finest scale: 8 cubes of the finest dyadic level
        let delta_f = side0 / (1u64 << (depth - 3)) as f64;
        let scales: Vec<f64> = (0..config.n_scales)
            .map(|k| delta_f * (1u64 << (config.n_scales - 1 - k)) as f64)
            .collect();

        let ms = MetricSpace::new(domain, whitney, alpha);
        let basepoint_cube = whitney.locate(domain.basepoint()).unwrap_or_else(|| {
            // fall back to the deepest cube
            (0..whitney.len())
                .max_by(|&a, &b| {
                    whitney.cubes()[a]
                        .dist_boundary
                        .partial_cmp(&whitney.cubes()[b].dist_boundary)
                        .unwrap()
                })
                .expect("decomposition is non-empty")
        });
        let base_reach = ms.single_source(basepoint_cube);

        let quantum = 1e-9 * side0;
        let mut ab = AlphaBoundary {
            alpha,
            scales,
            samples: Vec::new(),
            elements: Vec::new(),
            element_of_cube: vec![u32::MAX; whitney.len()],
            sample_of_cube: vec![u32::MAX; whitney.len()],
            base_reach,
            basepoint_cube,
            position_index: HashMap::new(),
            quantum,
            guard: DIVERGENCE_GUARD,
        };

        // sample set: cube anchors first (they drive the extension operator),
        // then a sweep of each boundary segment, then explicit extras
        let mut sample_of_cube: Vec<u32> = vec![u32::MAX; whitney.len()];
        for (id, c) in whitney.cubes().iter().enumerate() {
            let s = ab.intern_sample(c.anchor, c.anchor_face.segment);
            sample_of_cube[id] = s as u32;
        }
        let spacing = config
            .sample_spacing
            .unwrap_or(delta_f / 4.0)
            .max(perimeter(domain) / config.max_samples as f64);
        for (seg_id, bs) in domain.segments().iter().enumerate() {
            let len = bs.seg.sup_len();
            let n = (len / spacing).ceil() as usize;
            for k in 0..=n {
                let p = bs.seg.eval(k as f64 / n.max(1) as f64);
                ab.intern_sample(p, seg_id as u32);
            }
        }
        for &p in &config.extra_samples {
            let (_, snapped, face) = domain.nearest_boundary(p);
            ab.intern_sample(snapped, face.segment);
        }

        // per-sample clustering
        for s in 0..ab.samples.len() {
            ab.cluster_sample(s, domain, whitney, &ms, config);
        }

        // canonical element per cube
        ab.sample_of_cube = sample_of_cube.clone();
        for id in 0..whitney.len() {
            let s = sample_of_cube[id] as usize;
            ab.element_of_cube[id] = match ab.locate_element_for_approach(
                whitney,
                s,
                whitney.cubes()[id].cube.center,
            ) {
                Some(e) => e as u32,
                None => u32::MAX,
            };
        }
        Ok(ab)
    }

    fn intern_sample(&mut self, p: Point, segment: u32) -> usize {
        let key = (
            (p.x / self.quantum).round() as i64,
            (p.y / self.quantum).round() as i64,
        );
        if let Some(&s) = self.position_index.get(&key) {
            return s;
        }
        let s = self.samples.len();
        self.samples.push(BoundarySample {
            point: p,
            segment,
            element_ids: Vec::new(),
            reach_ladder: Vec::new(),
            inaccessible: false,
        });
        self.position_index.insert(key, s);
        s
    }

    /// Cubes of diameter at most `delta` within `delta` of `x`.
    fn group_members(
        &self,
        whitney: &WhitneyDecomposition,
        x: Point,
        delta: f64,
    ) -> Vec<u32> {
        let query = Rect::new(
            Point::new(x.x - delta, x.y - delta),
            Point::new(x.x + delta, x.y + delta),
        );
        let mut out: Vec<u32> = whitney
            .cubes_in_rect(&query)
            .into_iter()
            .filter(|&id| {
                let c = &whitney.cubes()[id];
                c.diam() <= delta && c.cube.rect().sup_dist_point(x) <= delta
            })
            .map(|id| id as u32)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Connected components of a member set under the Whitney adjacency,
    /// merged when the local chain distance between two components falls
    /// below `merge_tol * delta^alpha`.
    fn merged_components(
        &self,
        whitney: &WhitneyDecomposition,
        ms: &MetricSpace<'_>,
        x: Point,
        delta: f64,
        members: &[u32],
        merge_tol: f64,
    ) -> Vec<Vec<u32>> {
        if members.is_empty() {
            return Vec::new();
        }
        let member_set: HashMap<u32, usize> = members
            .iter()
            .enumerate()
            .map(|(k, &id)| (id, k))
            .collect();
        let mut dsu = Dsu::new(members.len());
        for (k, &id) in members.iter().enumerate() {
            for &nb in whitney.neighbors(id as usize).expect("valid id") {
                if let Some(&j) = member_set.get(&nb) {
                    dsu.union(k, j);
                }
            }
        }
        let mut groups: HashMap<usize, Vec<u32>> = HashMap::new();
        for (k, &id) in members.iter().enumerate() {
            groups.entry(dsu.find(k)).or_default().push(id);
        }
        let mut groups: Vec<Vec<u32>> = groups.into_values().collect();
        groups.sort_by_key(|g| g[0]);
        if groups.len() <= 1 {
            return groups;
        }

        // local chain distances within a ball of 6 delta around the sample
        let ball = 6.0 * delta;
        let local: Vec<usize> = whitney
            .cubes_in_rect(&Rect::new(
                Point::new(x.x - ball, x.y - ball),
                Point::new(x.x + ball, x.y + ball),
            ))
            .into_iter()
            .filter(|&id| whitney.cubes()[id].cube.rect().sup_dist_point(x) <= ball)
            .collect();
        let threshold = merge_tol * self.alpha.pow(delta);

        let mut merge = Dsu::new(groups.len());
        for gi in 0..groups.len() {
            let seeds: Vec<(usize, f64)> = groups[gi]
                .iter()
                .map(|&id| (id as usize, ms.cube_weight(id as usize)))
                .collect();
            let dist = local_dijkstra(whitney, ms, &local, &seeds);
            for gj in (gi + 1)..groups.len() {
                let best = groups[gj]
                    .iter()
                    .filter_map(|&id| dist.get(&(id as usize)).copied())
                    .fold(f64::INFINITY, f64::min);
                if best <= threshold {
                    merge.union(gi, gj);
                }
            }
        }
        let mut merged: HashMap<usize, Vec<u32>> = HashMap::new();
        for (gi, g) in groups.into_iter().enumerate() {
            merged.entry(merge.find(gi)).or_default().extend(g);
        }
        let mut merged: Vec<Vec<u32>> = merged.into_values().collect();
        for g in &mut merged {
            g.sort_unstable();
        }
        merged.sort_by_key(|g| g[0]);
        merged
    }

    fn cluster_sample(
        &mut self,
        s: usize,
        domain: &Domain,
        whitney: &WhitneyDecomposition,
        ms: &MetricSpace<'_>,
        config: &AlphaBoundaryConfig,
    ) {
        let x = self.samples[s].point;
        let n = self.scales.len();
        let delta_f = self.scales[n - 1];
        let finest_members = self.group_members(whitney, x, delta_f);
        let finest_groups =
            self.merged_components(whitney, ms, x, delta_f, &finest_members, config.merge_tol);

        let finest_reach = |groups: &[Vec<u32>]| -> f64 {
            groups
                .iter()
                .flatten()
                .map(|&id| self.base_reach[id as usize])
                .fold(f64::INFINITY, f64::min)
        };
        let reach_f = finest_reach(&finest_groups);

        let multi = finest_groups.len() > 1;
        let suspect_inaccessible = !reach_f.is_finite() || reach_f > self.guard;

        // ladder of per-scale clusters, materialized only when interesting
        let mut ladder_reach = Vec::new();
        let mut scale_groups: Vec<Vec<Vec<u32>>> = Vec::new();
        if multi || suspect_inaccessible {
            for k in 0..n {
                let delta = self.scales[k];
                let members = self.group_members(whitney, x, delta);
                let reach = members
                    .iter()
                    .map(|&id| self.base_reach[id as usize])
                    .fold(f64::INFINITY, f64::min);
                ladder_reach.push(reach);
                if multi {
                    scale_groups.push(self.merged_components(
                        whitney,
                        ms,
                        x,
                        delta,
                        &members,
                        config.merge_tol,
                    ));
                }
            }
        } else {
            ladder_reach.push(reach_f);
        }

        let inaccessible = ladder_reach
            .iter()
            .all(|r| !r.is_finite() || *r > self.guard);

        let mut element_ids = Vec::new();
        for group in finest_groups.iter() {
            let id = self.elements.len();
            // side of the face: probed from the cluster cube nearest the sample
            let probe_cube = group
                .iter()
                .map(|&c| {
                    let d = whitney.cubes()[c as usize].cube.rect().sup_dist_point(x);
                    (d, c)
                })
                .min_by(|a, b| a.partial_cmp(b).unwrap())
                .map(|(_, c)| c)
                .expect("group non-empty");
            let probe = whitney.cubes()[probe_cube as usize].cube.center;
            let seg_id = self.samples[s].segment;
            let face = domain.face_tag(seg_id, probe);
            // both slit sides in one cluster: the approach wraps a tip
            let seg = &domain.segments()[seg_id as usize].seg;
            let mut pos = false;
            let mut neg = false;
            for &c in group.iter() {
                let cc = whitney.cubes()[c as usize].cube.center;
                let cr = crate::geometry::cross(seg.a, seg.b, cc);
                if cr > 0.0 {
                    pos = true;
                } else if cr < 0.0 {
                    neg = true;
                }
            }
            let two_sided = pos && neg;

            let clusters = if multi {
                // chain of nested groups: at each scale pick the merged group
                // containing this finest group's lead cube
                let lead = group[0];
                (0..n)
                    .map(|k| {
                        let g = scale_groups[k]
                            .iter()
                            .find(|g| g.binary_search(&lead).is_ok())
                            .cloned()
                            .unwrap_or_else(|| group.clone());
                        ScaleCluster {
                            delta: self.scales[k],
                            cubes: g,
                        }
                    })
                    .collect()
            } else {
                vec![ScaleCluster {
                    delta: delta_f,
                    cubes: group.clone(),
                }]
            };
            let reach = group
                .iter()
                .map(|&c| self.base_reach[c as usize])
                .fold(f64::INFINITY, f64::min);
            self.elements.push(BoundaryElement {
                id,
                sample: s,
                anchor: x,
                face,
                clusters,
                reach,
                two_sided,
            });
            element_ids.push(id);
        }
        let sample = &mut self.samples[s];
        sample.element_ids = element_ids;
        sample.reach_ladder = ladder_reach;
        sample.inaccessible = inaccessible;
    }

    /// The element of sample `s` whose finest cluster the straight approach
    /// from `from` toward the sample lands in.
    fn locate_element_for_approach(
        &self,
        whitney: &WhitneyDecomposition,
        s: usize,
        from: Point,
    ) -> Option<usize> {
        let sample = &self.samples[s];
        match sample.element_ids.len() {
            0 => None,
            1 => Some(sample.element_ids[0]),
            _ => {
                let x = sample.point;
                let dir = from - x;
                let len = dir.x.abs().max(dir.y.abs());
                if len == 0.0 {
                    return None;
                }
                let delta_f = *self.scales.last().unwrap();
                let t = (0.5 * delta_f / len).min(1.0);
                let probe = Point::new(x.x + t * dir.x, x.y + t * dir.y);
                let mut best = (f64::INFINITY, usize::MAX);
                for &e in &sample.element_ids {
                    let d = self.elements[e]
                        .finest_cluster()
                        .cubes
                        .iter()
                        .map(|&c| whitney.cubes()[c as usize].cube.rect().sup_dist_point(probe))
                        .fold(f64::INFINITY, f64::min);
                    if (d, e) < best {
                        best = (d, e);
                    }
                }
                (best.0 <= delta_f).then_some(best.1)
            }
        }
    }

    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }

    pub fn elements(&self) -> &[BoundaryElement] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> Option<&BoundaryElement> {
        self.elements.get(id)
    }

    pub fn basepoint_cube(&self) -> usize {
        self.basepoint_cube
    }

    /// Chain distance from the basepoint to a cube.
    pub fn base_reach(&self, cube: usize) -> f64 {
        self.base_reach[cube]
    }

    /// Element ids at the boundary sample nearest to `p` (within `tol`).
    pub fn elements_at(&self, p: Point, tol: f64) -> Vec<usize> {
        self.sample_near(p, tol)
            .map(|s| self.samples[s].element_ids.clone())
            .unwrap_or_default()
    }

    /// Index of the sample nearest to `p` within `tol`.
    pub fn sample_near(&self, p: Point, tol: f64) -> Option<usize> {
        let r = (tol / self.quantum).ceil() as i64;
        let kx = (p.x / self.quantum).round() as i64;
        let ky = (p.y / self.quantum).round() as i64;
        let mut best: Option<(f64, usize)> = None;
        // samples are interned on a quantum grid; scan the covering window
        if r <= 64 {
            for dx in -r..=r {
                for dy in -r..=r {
                    if let Some(&s) = self.position_index.get(&(kx + dx, ky + dy)) {
                        let d = self.samples[s].point.sup_dist(p);
                        if d <= tol && best.map_or(true, |(bd, _)| d < bd) {
                            best = Some((d, s));
                        }
                    }
                }
            }
        } else {
            for (s, sample) in self.samples.iter().enumerate() {
                let d = sample.point.sup_dist(p);
                if d <= tol && best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, s));
                }
            }
        }
        best.map(|(_, s)| s)
    }

    /// Samples flagged inaccessible, with their divergence ladders.
    pub fn inaccessible(&self) -> Vec<&BoundarySample> {
        self.samples.iter().filter(|s| s.inaccessible).collect()
    }

    /// The canonical element `omega_{Q, alpha}` of a Whitney cube: the
    /// element reached by the straight approach from the cube center to its
    /// anchor.
    pub fn omega_for_cube(&self, q: usize) -> Result<&BoundaryElement> {
        let e = *self
            .element_of_cube
            .get(q)
            .ok_or(Error::InvalidCubeId(q))?;
        if e == u32::MAX {
            let s = self.sample_of_cube[q] as usize;
            let p = self.samples[s].point;
            return Err(Error::ApproachLost(p.x, p.y));
        }
        Ok(&self.elements[e as usize])
    }

    /// Is `omega` visible from the cube in the tagged-point sense, and does
    /// the straight approach from the cube center belong to `omega`?
    pub fn is_alpha_q_visible(
        &self,
        domain: &Domain,
        whitney: &WhitneyDecomposition,
        element: usize,
        q: &Cube,
    ) -> bool {
        let el = &self.elements[element];
        let visible = if el.two_sided {
            // tip-like element: approaches wrap the end of the face
            domain.is_q_visible(q, el.anchor)
        } else {
            domain.is_q_visible_sided(q, el.anchor, el.face)
        };
        if !visible {
            return false;
        }
        match self.locate_element_for_approach(whitney, el.sample, q.center) {
            Some(e) => e == element,
            None => false,
        }
    }

    /// Chain estimates of the completion metrics between two endpoints.
    /// `rho_c` omits the anchor-gap term; `d_tilde_c` adds
    /// `|anchor_1 - anchor_2|^alpha` exactly.
    pub fn element_metric(
        &self,
        whitney: &WhitneyDecomposition,
        ms: &MetricSpace<'_>,
        a: MetricEndpoint,
        b: MetricEndpoint,
    ) -> Result<ElementMetric> {
        // canonical order for exact symmetry
        let (a, b) = match (a, b) {
            (MetricEndpoint::Element(x), MetricEndpoint::Element(y)) if y < x => {
                (MetricEndpoint::Element(y), MetricEndpoint::Element(x))
            }
            other => other,
        };
        let anchor = |e: &MetricEndpoint| -> Result<Point> {
            Ok(match e {
                MetricEndpoint::Element(id) => self.elements[*id].anchor,
                MetricEndpoint::Interior(p) => *p,
            })
        };
        let rep = |e: &MetricEndpoint, k: usize| -> Result<usize> {
            match e {
                MetricEndpoint::Element(id) => Ok(self.elements[*id].representative(whitney, k)),
                MetricEndpoint::Interior(p) => whitney
                    .locate(*p)
                    .ok_or(Error::DeficitRegion(p.x, p.y)),
            }
        };
        let pa = anchor(&a)?;
        let pb = anchor(&b)?;
        let gap = self.alpha.pow(pa.sup_dist(pb));

        let n = self.scales.len();
        let mut ladder = Vec::with_capacity(n);
        let mut chain: Vec<u32> = Vec::new();
        for k in 0..n {
            let ra = rep(&a, k)?;
            let rb = rep(&b, k)?;
            let v = if ra == rb {
                0.0
            } else {
                let dist = ms.multi_source(&[(ra, ms.cube_weight(ra))]);
                dist[rb]
            };
            ladder.push(v);
            if k + 1 == n {
                chain = vec![ra as u32, rb as u32];
            }
        }
        let finest = *ladder.last().unwrap();
        let divergent = !finest.is_finite() || finest > self.guard;
        let extrapolated = if divergent || n < 2 {
            finest
        } else {
            let prev = ladder[n - 2];
            let denom = 2.0f64.powf(self.alpha.value()) - 1.0;
            (finest - (prev - finest) / denom).max(0.0)
        };
        let rho_c = MetricEstimate {
            upper: finest,
            chain_sum: finest,
            chain: chain.clone(),
            certified_lower: 0.0,
        };
        let d_tilde_c = MetricEstimate {
            upper: finest + gap,
            chain_sum: finest,
            chain,
            certified_lower: gap,
        };
        Ok(ElementMetric {
            d_tilde_c,
            rho_c,
            ladder,
            extrapolated_rho: extrapolated,
            divergent,
        })
    }

    /// Elements as a JSON array following the export schema.
    pub fn elements_json(&self) -> serde_json::Value {
        let items: Vec<serde_json::Value> = self
            .elements
            .iter()
            .map(|e| {
                serde_json::json!({
                    "id": e.id,
                    "anchor": [e.anchor.x, e.anchor.y],
                    "face": e.face.to_string(),
                    "scales": e.clusters.iter().map(|c| c.delta).collect::<Vec<_>>(),
                    "cluster_sizes": e.clusters.iter().map(|c| c.cubes.len()).collect::<Vec<_>>(),
                    "reach": if e.reach.is_finite() { serde_json::json!(e.reach) } else { serde_json::Value::Null },
                })
            })
            .collect();
        serde_json::Value::Array(items)
    }

    /// Inaccessible samples as JSON, with divergence ladders (null = beyond
    /// the guard).
    pub fn inaccessible_json(&self) -> serde_json::Value {
        let items: Vec<serde_json::Value> = self
            .samples
            .iter()
            .filter(|s| s.inaccessible)
            .map(|s| {
                serde_json::json!({
                    "point": [s.point.x, s.point.y],
                    "segment": s.segment,
                    "ladder": s
                        .reach_ladder
                        .iter()
                        .map(|r| if r.is_finite() { serde_json::json!(r) } else { serde_json::Value::Null })
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::Value::Array(items)
    }
}

/// Project an element of a finer-exponent boundary (`beta < alpha`) onto the
/// alpha-boundary built on the same decomposition: the alpha-element whose
/// finest cluster contains (or is nearest to) the beta-element's
/// representative cubes.
pub fn project_beta_to_alpha(
    ab_alpha: &AlphaBoundary,
    ab_beta: &AlphaBoundary,
    whitney: &WhitneyDecomposition,
    omega_beta: usize,
) -> Result<usize> {
    let el_b = ab_beta
        .element(omega_beta)
        .ok_or(Error::InvalidInput(format!("no beta element {omega_beta}")))?;
    let tol = 4.0 * ab_alpha.quantum;
    let s_alpha = ab_alpha
        .sample_near(el_b.anchor, tol)
        .ok_or_else(|| Error::InvalidInput("beta anchor missing in alpha boundary".into()))?;
    let sample = &ab_alpha.samples[s_alpha];
    match sample.element_ids.len() {
        0 => Err(Error::InvalidInput("alpha sample carries no elements".into())),
        1 => Ok(sample.element_ids[0]),
        _ => {
            let rep = el_b.representative(whitney, ab_beta.scales.len() - 1);
            let rep_rect = whitney.cubes()[rep].cube.rect();
            let mut best = (f64::INFINITY, usize::MAX);
            for &e in &sample.element_ids {
                // containment first, then distance
                let el_a = &ab_alpha.elements[e];
                if el_a.finest_cluster().cubes.binary_search(&(rep as u32)).is_ok() {
                    return Ok(e);
                }
                let d = el_a
                    .finest_cluster()
                    .cubes
                    .iter()
                    .map(|&c| {
                        let r = whitney.cubes()[c as usize].cube.rect();
                        rect_gap(&rep_rect, &r)
                    })
                    .fold(f64::INFINITY, f64::min);
                if (d, e) < best {
                    best = (d, e);
                }
            }
            if best.1 == usize::MAX {
                return Err(Error::InvalidInput("projection found no alpha element".into()));
            }
            Ok(best.1)
        }
    }
}

fn rect_gap(a: &Rect, b: &Rect) -> f64 {
    let dx = (b.lo.x - a.hi.x).max(a.lo.x - b.hi.x).max(0.0);
    let dy = (b.lo.y - a.hi.y).max(a.lo.y - b.hi.y).max(0.0);
    dx.max(dy)
}

fn perimeter(domain: &Domain) -> f64 {
    domain.segments().iter().map(|s| s.seg.sup_len()).sum()
}

/// Dijkstra restricted to an explicit node subset; returns a map from node to
/// cost for reached members.
fn local_dijkstra(
    whitney: &WhitneyDecomposition,
    ms: &MetricSpace<'_>,
    nodes: &[usize],
    seeds: &[(usize, f64)],
) -> HashMap<usize, f64> {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Item(f64, usize);
    impl Eq for Item {}
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> Ordering {
            other
                .0
                .partial_cmp(&self.0)
                .unwrap_or(Ordering::Equal)
                .then_with(|| other.1.cmp(&self.1))
        }
    }
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    let allowed: HashMap<usize, ()> = nodes.iter().map(|&n| (n, ())).collect();
    let mut dist: HashMap<usize, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for &(s, c) in seeds {
        if allowed.contains_key(&s) && dist.get(&s).map_or(true, |&d| c < d) {
            dist.insert(s, c);
            heap.push(Item(c, s));
        }
    }
    while let Some(Item(cost, node)) = heap.pop() {
        if dist.get(&node).map_or(true, |&d| cost > d) {
            continue;
        }
        for &nb in whitney.neighbors(node).expect("valid id") {
            let nb = nb as usize;
            if !allowed.contains_key(&nb) {
                continue;
            }
            let next = cost + ms.cube_weight(nb);
            if dist.get(&nb).map_or(true, |&d| next < d) {
                dist.insert(nb, next);
                heap.push(Item(next, nb));
            }
        }
    }
    dist
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller root for deterministic group leads
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
