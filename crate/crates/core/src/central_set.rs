//! The central set (medial axis) of a disk union as a finite graph of
//! geodesic segments, with its radius function and sub-unions.
//!
//! Vertices are disk centers that carry a boundary arc and points
//! equidistant from three sample points of the boundary (corners and arc
//! midpoints) whose touching disk is inscribed in the union. Edges are
//! bisector segments between vertices sharing two touching points.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::ball_union::{validate, BallConfiguration, BallPolytope, UnionError};
use crate::geom::{Disk, GeomError, Point, Surface};

/// Slack for "touches the boundary" decisions.
const TOUCH: f64 = 1e-8;
/// Candidate vertices closer than this are merged.
const MERGE: f64 = 1e-7;
/// Vertex matching tolerance when comparing two complexes.
const MATCH: f64 = 1e-6;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CentralSetError {
    #[error("union has {0} components; the central set needs a connected union")]
    DisconnectedUnion(usize),
    #[error("location is not on the complex")]
    LocationOffComplex,
    #[error("point is outside the union")]
    PointOutsideUnion,
    #[error("subcomplex is empty")]
    EmptySubcomplex,
    #[error("subcomplex is not closed: edge {0} is missing an endpoint")]
    NotClosed(usize),
    #[error(transparent)]
    Union(#[from] UnionError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    DiskCenter,
    VoronoiVertex,
    Subdivision,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralVertex {
    pub point: Point,
    pub radius: f64,
    pub kind: VertexKind,
    /// Indices into the sample set of the boundary points at distance `radius`.
    pub touching: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralEdge {
    pub ends: [usize; 2],
    /// The two boundary points the edge is equidistant from.
    pub corners: [usize; 2],
}

/// A position on the complex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Location {
    Vertex(usize),
    Edge { edge: usize, t: f64 },
}

#[derive(Clone, Debug)]
pub struct CentralComplex {
    pub surface: Surface,
    pub vertices: Vec<CentralVertex>,
    pub edges: Vec<CentralEdge>,
    /// Boundary sample points referenced by vertices and edges.
    pub lambda: Vec<Point>,
    source: Arc<BallPolytope>,
}

struct Candidate {
    point: Point,
    radius: f64,
    kind: VertexKind,
}

/// Computes the central set of a connected validated union.
pub fn central_set(poly: &BallPolytope) -> Result<CentralComplex, CentralSetError> {
    let topo = poly.topology();
    if topo.component_count != 1 {
        return Err(CentralSetError::DisconnectedUnion(topo.component_count));
    }
    let surf = poly.surface();
    let disks = poly.config().disks();

    let mut lambda: Vec<Point> = poly.corners().iter().map(|c| c.point).collect();
    for arc in poly.arcs() {
        if arc.is_full_circle() {
            for s in [0.0, 1.0 / 3.0, 2.0 / 3.0] {
                lambda.push(poly.arc_point(arc, s));
            }
        } else {
            lambda.push(poly.arc_point(arc, 0.5));
        }
    }

    let inscribed = |x: &Point, rho: f64| -> bool {
        lambda.iter().all(|q| surf.distance(x, q) >= rho - TOUCH)
            && poly.contains(x)
            && poly.boundary_distance(x) >= rho - TOUCH
    };

    let mut cands: Vec<Candidate> = Vec::new();
    let mut arc_disks: Vec<usize> = poly.arcs().iter().map(|a| a.disk).collect();
    arc_disks.sort_unstable();
    arc_disks.dedup();
    for &i in &arc_disks {
        cands.push(Candidate { point: disks[i].center, radius: disks[i].radius, kind: VertexKind::DiskCenter });
    }
    let n = lambda.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let Ok(points) = surf.equidistant_points(&lambda[a], &lambda[b], &lambda[c]) else {
                    continue;
                };
                for x in points {
                    let rho = (surf.distance(&x, &lambda[a]) + surf.distance(&x, &lambda[b]) + surf.distance(&x, &lambda[c])) / 3.0;
                    if inscribed(&x, rho) {
                        cands.push(Candidate { point: x, radius: rho, kind: VertexKind::VoronoiVertex });
                    }
                }
            }
        }
    }

    let mut vertices: Vec<CentralVertex> = Vec::new();
    for c in cands {
        if vertices.iter().any(|v| surf.distance(&v.point, &c.point) < MERGE) {
            continue;
        }
        let touching = (0..n)
            .filter(|&k| (surf.distance(&c.point, &lambda[k]) - c.radius).abs() <= TOUCH)
            .collect();
        vertices.push(CentralVertex { point: c.point, radius: c.radius, kind: c.kind, touching });
    }

    let mut edges = Vec::new();
    for u in 0..vertices.len() {
        for v in u + 1..vertices.len() {
            let (pu, pv) = (&vertices[u].point, &vertices[v].point);
            let len = surf.distance(pu, pv);
            if surf == Surface::Spherical && len > std::f64::consts::PI - 1e-6 {
                continue;
            }
            let shared: Vec<usize> = vertices[u]
                .touching
                .iter()
                .copied()
                .filter(|k| vertices[v].touching.contains(k))
                .collect();
            if shared.len() < 2 {
                continue;
            }
            let corner_count = poly.corners().len();
            let mut pair: Vec<usize> = shared.iter().copied().filter(|&k| k < corner_count).collect();
            pair.extend(shared.iter().copied().filter(|&k| k >= corner_count));
            let (a, b) = (pair[0], pair[1]);
            let between = vertices.iter().enumerate().any(|(w, vw)| {
                w != u
                    && w != v
                    && (surf.distance(pu, &vw.point) + surf.distance(&vw.point, pv) - len).abs() < 1e-9
            });
            if between {
                continue;
            }
            let ok = [0.25, 0.5, 0.75].iter().all(|&s| {
                let x = surf.geodesic_eval_unchecked(pu, pv, len, s);
                let rho = surf.distance(&x, &lambda[a]);
                (surf.distance(&x, &lambda[b]) - rho).abs() <= 1e3 * TOUCH && inscribed(&x, rho)
            });
            if ok {
                edges.push(CentralEdge { ends: [u, v], corners: [a, b] });
            }
        }
    }

    Ok(CentralComplex { surface: surf, vertices, edges, lambda, source: Arc::new(poly.clone()) })
}

impl CentralComplex {
    pub fn source(&self) -> &BallPolytope {
        &self.source
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.ends.contains(&v)).count()
    }

    pub fn component_count(&self) -> usize {
        let mut dsu: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(d: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while d[r] != r {
                r = d[r];
            }
            d[i] = r;
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut dsu, e.ends[0]), find(&mut dsu, e.ends[1]));
            dsu[a.max(b)] = a.min(b);
        }
        (0..self.vertices.len()).filter(|&i| find(&mut dsu, i) == i).count()
    }

    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty() && self.component_count() == 1 && self.euler_characteristic() == 1
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].ends;
        self.surface.distance(&self.vertices[a].point, &self.vertices[b].point)
    }

    /// Point at fraction `t` along an edge, from its first end.
    pub fn edge_point(&self, e: usize, t: f64) -> Point {
        let [a, b] = self.edges[e].ends;
        let (p, q) = (&self.vertices[a].point, &self.vertices[b].point);
        self.surface.geodesic_eval_unchecked(p, q, self.surface.distance(p, q), t)
    }

    pub fn location_point(&self, loc: Location) -> Result<Point, CentralSetError> {
        match loc {
            Location::Vertex(v) => self.vertices.get(v).map(|v| v.point).ok_or(CentralSetError::LocationOffComplex),
            Location::Edge { edge, t } => {
                if edge >= self.edges.len() || !(-1e-12..=1.0 + 1e-12).contains(&t) {
                    return Err(CentralSetError::LocationOffComplex);
                }
                Ok(self.edge_point(edge, t.clamp(0.0, 1.0)))
            }
        }
    }

    /// Radius of the maximal disk centered at a location.
    pub fn radius_at(&self, loc: Location) -> Result<f64, CentralSetError> {
        match loc {
            Location::Vertex(v) => self.vertices.get(v).map(|v| v.radius).ok_or(CentralSetError::LocationOffComplex),
            Location::Edge { edge, .. } => {
                let x = self.location_point(loc)?;
                Ok(self.surface.distance(&x, &self.lambda[self.edges[edge].corners[0]]))
            }
        }
    }

    /// The maximal disks at the vertices; their union is the original union.
    pub fn reconstruct(&self) -> BallConfiguration {
        let disks = self.vertices.iter().map(|v| Disk::new(v.point, v.radius)).collect();
        BallConfiguration::new(self.surface, disks).expect("central vertices carry positive radii")
    }

    /// Splits an edge at parameter `t`; returns the new complex and the new vertex.
    pub fn subdivide(&self, edge: usize, t: f64) -> Result<(CentralComplex, usize), CentralSetError> {
        if edge >= self.edges.len() || !(t > 0.0 && t < 1.0) {
            return Err(CentralSetError::LocationOffComplex);
        }
        let point = self.edge_point(edge, t);
        let radius = self.radius_at(Location::Edge { edge, t })?;
        let mut out = self.clone();
        let e = out.edges[edge].clone();
        let id = out.vertices.len();
        out.vertices.push(CentralVertex { point, radius, kind: VertexKind::Subdivision, touching: e.corners.to_vec() });
        out.edges[edge] = CentralEdge { ends: [e.ends[0], id], corners: e.corners };
        out.edges.push(CentralEdge { ends: [id, e.ends[1]], corners: e.corners });
        Ok((out, id))
    }

    /// Splits an edge at the point of it closest to `p`.
    pub fn subdivide_at(&self, edge: usize, p: &Point) -> Result<(CentralComplex, usize), CentralSetError> {
        if edge >= self.edges.len() {
            return Err(CentralSetError::LocationOffComplex);
        }
        let len = self.edge_length(edge);
        let a = &self.vertices[self.edges[edge].ends[0]].point;
        let t = self.surface.distance(a, p) / len;
        let back = self.edge_point(edge, t);
        if self.surface.distance(&back, p) > 1e-7 {
            return Err(CentralSetError::LocationOffComplex);
        }
        self.subdivide(edge, t)
    }

    pub(crate) fn from_parts(source: &CentralComplex, vertices: Vec<CentralVertex>, edges: Vec<CentralEdge>) -> CentralComplex {
        CentralComplex {
            surface: source.surface,
            vertices,
            edges,
            lambda: source.lambda.clone(),
            source: Arc::clone(&source.source),
        }
    }
}

pub fn radius_at(cc: &CentralComplex, loc: Location) -> Result<f64, CentralSetError> {
    cc.radius_at(loc)
}

pub fn reconstruct(cc: &CentralComplex) -> BallConfiguration {
    cc.reconstruct()
}

/// A closed set of vertices and whole edges of a complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subcomplex {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
}

impl Subcomplex {
    pub fn new(
        cc: &CentralComplex,
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = usize>,
    ) -> Result<Subcomplex, CentralSetError> {
        let vertices: BTreeSet<usize> = vertices.into_iter().collect();
        let edges: BTreeSet<usize> = edges.into_iter().collect();
        if vertices.is_empty() && edges.is_empty() {
            return Err(CentralSetError::EmptySubcomplex);
        }
        if vertices.iter().any(|&v| v >= cc.vertices.len()) || edges.iter().any(|&e| e >= cc.edges.len()) {
            return Err(CentralSetError::LocationOffComplex);
        }
        for &e in &edges {
            if !cc.edges[e].ends.iter().all(|v| vertices.contains(v)) {
                return Err(CentralSetError::NotClosed(e));
            }
        }
        Ok(Subcomplex { vertices, edges })
    }

    /// The given edges together with their endpoints.
    pub fn from_edges(cc: &CentralComplex, edges: impl IntoIterator<Item = usize>) -> Result<Subcomplex, CentralSetError> {
        let edges: BTreeSet<usize> = edges.into_iter().collect();
        if edges.iter().any(|&e| e >= cc.edges.len()) {
            return Err(CentralSetError::LocationOffComplex);
        }
        let vertices: BTreeSet<usize> = edges.iter().flat_map(|&e| cc.edges[e].ends).collect();
        Subcomplex::new(cc, vertices, edges)
    }

    pub fn whole(cc: &CentralComplex) -> Subcomplex {
        Subcomplex { vertices: (0..cc.vertices.len()).collect(), edges: (0..cc.edges.len()).collect() }
    }

    pub fn intersection(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex {
            vertices: self.vertices.intersection(&other.vertices).copied().collect(),
            edges: self.edges.intersection(&other.edges).copied().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Closure of everything not in `self`.
    pub fn complement_closure(&self, cc: &CentralComplex) -> Subcomplex {
        let edges: BTreeSet<usize> = (0..cc.edges.len()).filter(|e| !self.edges.contains(e)).collect();
        let mut vertices: BTreeSet<usize> = edges.iter().flat_map(|&e| cc.edges[e].ends).collect();
        vertices.extend((0..cc.vertices.len()).filter(|v| !self.vertices.contains(v)));
        Subcomplex { vertices, edges }
    }

    /// Whether `self ∪ other` is the whole complex.
    pub fn covers_with(&self, other: &Subcomplex, cc: &CentralComplex) -> bool {
        (0..cc.vertices.len()).all(|v| self.vertices.contains(&v) || other.vertices.contains(&v))
            && (0..cc.edges.len()).all(|e| self.edges.contains(&e) || other.edges.contains(&e))
    }

    /// Vertices of degree two inside `self` whose edges lie on one bisector.
    fn pass_through(&self, cc: &CentralComplex, v: usize) -> bool {
        let inc: Vec<usize> = self.edges.iter().copied().filter(|&e| cc.edges[e].ends.contains(&v)).collect();
        if inc.len() != 2 {
            return false;
        }
        let key = |e: usize| {
            let mut c = cc.edges[e].corners;
            c.sort_unstable();
            c
        };
        key(inc[0]) == key(inc[1])
    }
}

/// Disks whose union is the union of all maximal disks centered on `x`.
pub fn sub_union(cc: &CentralComplex, x: &Subcomplex) -> Result<BallConfiguration, CentralSetError> {
    if x.is_empty() {
        return Err(CentralSetError::EmptySubcomplex);
    }
    let disks: Vec<Disk> = x
        .vertices
        .iter()
        .filter(|&&v| !x.pass_through(cc, v))
        .map(|&v| Disk::new(cc.vertices[v].point, cc.vertices[v].radius))
        .collect();
    Ok(BallConfiguration::new(cc.surface, disks)?)
}

/// Outcome of comparing the central set of a sub-union with the subcomplex.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SubCentralReport {
    pub matches: bool,
    pub expected_vertices: usize,
    pub found_vertices: usize,
    pub expected_edges: usize,
    pub found_edges: usize,
    pub unmatched_expected: Vec<Vec<f64>>,
    pub unmatched_found: Vec<Vec<f64>>,
}

/// Recomputes the central set of the sub-union of `x` and compares it with `x`
/// after contracting pass-through vertices.
pub fn sub_central_set_check(cc: &CentralComplex, x: &Subcomplex) -> Result<SubCentralReport, CentralSetError> {
    let surf = cc.surface;
    let config = sub_union(cc, x)?;
    let poly = validate(&config)?;
    let found = central_set(&poly)?;

    let essential: Vec<usize> = x.vertices.iter().copied().filter(|&v| !x.pass_through(cc, v)).collect();
    // walk chains of pass-through vertices to find essential edge endpoints
    let mut expected_edges: Vec<(usize, usize)> = Vec::new();
    let mut used = BTreeSet::new();
    for &e in &x.edges {
        if used.contains(&e) {
            continue;
        }
        let mut ends = Vec::new();
        used.insert(e);
        for side in 0..2 {
            let mut v = cc.edges[e].ends[side];
            let mut cur = e;
            while x.pass_through(cc, v) {
                let next = x
                    .edges
                    .iter()
                    .copied()
                    .find(|&f| f != cur && cc.edges[f].ends.contains(&v))
                    .expect("pass-through vertices have two edges");
                if !used.insert(next) {
                    break;
                }
                cur = next;
                let [a, b] = cc.edges[next].ends;
                v = if a == v { b } else { a };
            }
            ends.push(v);
        }
        expected_edges.push((ends[0], ends[1]));
    }

    let mut map = vec![usize::MAX; cc.vertices.len()];
    let mut taken = vec![false; found.vertices.len()];
    let mut unmatched_expected = Vec::new();
    for &v in &essential {
        let p = &cc.vertices[v].point;
        let hit = (0..found.vertices.len())
            .filter(|&k| !taken[k])
            .map(|k| (surf.distance(p, &found.vertices[k].point), k))
            .filter(|(d, _)| *d < MATCH)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match hit {
            Some((_, k)) => {
                taken[k] = true;
                map[v] = k;
            }
            None => unmatched_expected.push(p.coords(surf)),
        }
    }
    let unmatched_found: Vec<Vec<f64>> = (0..found.vertices.len())
        .filter(|&k| !taken[k])
        .map(|k| found.vertices[k].point.coords(surf))
        .collect();

    let norm = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut want: Vec<(usize, usize)> = expected_edges
        .iter()
        .map(|&(a, b)| norm(map[a], map[b]))
        .collect();
    let mut got: Vec<(usize, usize)> = found.edges.iter().map(|e| norm(e.ends[0], e.ends[1])).collect();
    want.sort_unstable();
    got.sort_unstable();

    Ok(SubCentralReport {
        matches: unmatched_expected.is_empty() && unmatched_found.is_empty() && want == got,
        expected_vertices: essential.len(),
        found_vertices: found.vertices.len(),
        expected_edges: expected_edges.len(),
        found_edges: found.edges.len(),
        unmatched_expected,
        unmatched_found,
    })
}

/// Part of an edge selected by a relative central set, as a parameter range.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct EdgePiece {
    pub edge: usize,
    pub t0: f64,
    pub t1: f64,
}

/// Points of the complex whose maximal disk contains a given point.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeCentralSet {
    pub vertices: Vec<usize>,
    pub pieces: Vec<EdgePiece>,
}

impl RelativeCentralSet {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.pieces.is_empty()
    }

    pub fn component_count(&self, cc: &CentralComplex) -> usize {
        let nv = cc.vertices.len();
        let mut dsu: Vec<usize> = (0..nv + self.pieces.len()).collect();
        fn find(d: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while d[r] != r {
                r = d[r];
            }
            d[i] = r;
            r
        }
        let join = |d: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(d, a), find(d, b));
            d[ra.max(rb)] = ra.min(rb);
        };
        for (k, piece) in self.pieces.iter().enumerate() {
            let [a, b] = cc.edges[piece.edge].ends;
            if piece.t0 <= 0.0 {
                join(&mut dsu, nv + k, a);
            }
            if piece.t1 >= 1.0 {
                join(&mut dsu, nv + k, b);
            }
        }
        let mut roots = BTreeSet::new();
        for &v in &self.vertices {
            roots.insert(find(&mut dsu, v));
        }
        for k in 0..self.pieces.len() {
            roots.insert(find(&mut dsu, nv + k));
        }
        roots.len()
    }

    pub fn is_connected(&self, cc: &CentralComplex) -> bool {
        self.component_count(cc) == 1
    }
}

/// The relative central set of `p`.
pub fn relative_central_set(cc: &CentralComplex, p: &Point) -> Result<RelativeCentralSet, CentralSetError> {
    let surf = cc.surface;
    if !cc.source.contains(p) {
        return Err(CentralSetError::PointOutsideUnion);
    }
    let slack = |x: &Point, r: f64| r - surf.distance(x, p);
    let vertices: Vec<usize> = (0..cc.vertices.len())
        .filter(|&v| slack(&cc.vertices[v].point, cc.vertices[v].radius) >= -crate::geom::EPS_PRED)
        .collect();
    let mut pieces = Vec::new();
    for e in 0..cc.edges.len() {
        let corner = cc.lambda[cc.edges[e].corners[0]];
        let g = |t: f64| {
            let x = cc.edge_point(e, t);
            slack(&x, surf.distance(&x, &corner))
        };
        let [a, b] = cc.edges[e].ends;
        let in0 = vertices.contains(&a);
        let in1 = vertices.contains(&b);
        match (in0, in1) {
            (true, true) => pieces.push(EdgePiece { edge: e, t0: 0.0, t1: 1.0 }),
            (false, false) => {}
            _ => {
                // the selected part is a half-plane section containing one end
                let (mut lo, mut hi): (f64, f64) = if in0 { (0.0, 1.0) } else { (1.0, 0.0) };
                while (hi - lo).abs() > 1e-10 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) >= 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let cut = lo;
                let (t0, t1) = if in0 { (0.0, cut) } else { (cut, 1.0) };
                pieces.push(EdgePiece { edge: e, t0, t1 });
            }
        }
    }
    Ok(RelativeCentralSet { vertices, pieces })
}
