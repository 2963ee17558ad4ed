//! Disk configurations, their boundary arrangement and exact union areas.
//!
//! [`validate`] turns a [`BallConfiguration`] into a [`BallPolytope`]: the
//! boundary of the union split into circular arcs joined at corners. Areas
//! come from Green's theorem on the plane and from Gauss–Bonnet on the
//! sphere and the hyperbolic plane.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::geom::{Disk, GeomError, Point, Surface, Vec3, EPS_PRED};

/// Intersection points closer than this are the same corner.
const MERGE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum UnionError {
    #[error("configuration has no disks")]
    Empty,
    #[error("disk {0} has zero radius")]
    ZeroRadius(usize),
    #[error("disk {index}: {source}")]
    InvalidDisk { index: usize, source: GeomError },
    #[error("circles of disks {0} and {1} are tangent")]
    TangentCircles(usize, usize),
    #[error("circles of disks {0} and {1} coincide")]
    CoincidentCircles(usize, usize),
    #[error("boundary is not a manifold at a point shared by circles {0:?}")]
    CornerOnThirdCircle(Vec<usize>),
    #[error("the disks cover the whole sphere")]
    SphereCovered,
    #[error("operation requires the spherical surface")]
    NonSphericalSurface,
}

/// A finite, nonempty list of positive-radius disks on one surface.
#[derive(Clone, Debug, PartialEq)]
pub struct BallConfiguration {
    surface: Surface,
    disks: Vec<Disk>,
}

impl BallConfiguration {
    pub fn new(surface: Surface, disks: Vec<Disk>) -> Result<Self, UnionError> {
        if disks.is_empty() {
            return Err(UnionError::Empty);
        }
        for (index, d) in disks.iter().enumerate() {
            surface
                .check_point(&d.center)
                .map_err(|source| UnionError::InvalidDisk { index, source })?;
            if d.radius == 0.0 {
                return Err(UnionError::ZeroRadius(index));
            }
            if !(d.radius > 0.0) || !d.radius.is_finite() || (surface == Surface::Spherical && d.radius >= PI) {
                return Err(UnionError::InvalidDisk { index, source: GeomError::InvalidRadius(d.radius, surface) });
            }
        }
        Ok(BallConfiguration { surface, disks })
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    /// Closed membership with tolerance [`EPS_PRED`].
    pub fn contains(&self, p: &Point) -> bool {
        self.disks
            .iter()
            .any(|d| self.surface.distance(p, &d.center) - d.radius <= EPS_PRED)
    }

    /// Membership without tolerance, for sampling oracles.
    pub fn contains_strict(&self, p: &Point) -> bool {
        self.disks
            .iter()
            .any(|d| self.surface.distance(p, &d.center) <= d.radius)
    }
}

pub fn contains(config: &BallConfiguration, p: &Point) -> bool {
    config.contains(p)
}

/// A transversal meeting point of boundary arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct Corner {
    pub point: Point,
    /// Disk of the arc arriving at the corner, then the disk of the arc leaving it.
    pub circles: [usize; 2],
    /// Every disk whose circle passes through the corner.
    pub incident: Vec<usize>,
}

/// A maximal circular piece of the boundary, oriented counterclockwise
/// about its own disk center (the union lies on its left).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryArc {
    pub disk: usize,
    pub start: Option<usize>,
    pub end: Option<usize>,
    pub start_angle: f64,
    pub span: f64,
}

impl BoundaryArc {
    pub fn is_full_circle(&self) -> bool {
        self.start.is_none()
    }
}

/// A disk that was dropped because it lies inside another one.
#[derive(Clone, Debug, PartialEq)]
pub struct Redundancy {
    pub dropped: usize,
    pub container: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TopologyReport {
    pub component_count: usize,
    pub hole_count: usize,
    pub euler_characteristic: i64,
    pub simply_connected: bool,
}

/// A validated disk union with its boundary arrangement.
#[derive(Clone, Debug)]
pub struct BallPolytope {
    config: BallConfiguration,
    active: Vec<usize>,
    frames: Vec<(Vec3, Vec3)>,
    corners: Vec<Corner>,
    arcs: Vec<BoundaryArc>,
    cycles: Vec<Vec<usize>>,
    components: usize,
    warnings: Vec<Redundancy>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Builds the boundary arrangement of the union.
pub fn validate(config: &BallConfiguration) -> Result<BallPolytope, UnionError> {
    let surf = config.surface;
    let disks = &config.disks;
    let n = disks.len();
    let dist = |i: usize, j: usize| surf.distance(&disks[i].center, &disks[j].center);

    let mut warnings = Vec::new();
    let mut dropped = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || dropped[j] {
                continue;
            }
            let (ri, rj) = (disks[i].radius, disks[j].radius);
            let inside = dist(i, j) + ri <= rj + EPS_PRED;
            if inside && (ri < rj - EPS_PRED || j < i) {
                dropped[i] = true;
                warnings.push(Redundancy { dropped: i, container: j });
                break;
            }
        }
    }
    let active: Vec<usize> = (0..n).filter(|&i| !dropped[i]).collect();

    // pairwise classification and raw intersection points
    let mut nodes: Vec<Point> = Vec::new();
    let mut node_circles: Vec<Vec<usize>> = Vec::new();
    let mut on_circle: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dsu = Dsu::new(n);
    for (a, &i) in active.iter().enumerate() {
        for &j in &active[a + 1..] {
            let (ri, rj) = (disks[i].radius, disks[j].radius);
            let d = dist(i, j);
            if surf == Surface::Spherical {
                let far = TAU - ri - rj;
                if (d - far).abs() <= EPS_PRED {
                    return Err(UnionError::TangentCircles(i, j));
                }
                if d > far {
                    return Err(UnionError::SphereCovered);
                }
            }
            if (d - (ri + rj)).abs() <= EPS_PRED || (d - (ri - rj).abs()).abs() <= EPS_PRED {
                return Err(UnionError::TangentCircles(i, j));
            }
            if d < ri + rj {
                dsu.union(i, j);
            }
            let hit = surf
                .circle_intersections(&disks[i], &disks[j])
                .map_err(|_| UnionError::CoincidentCircles(i, j))?;
            if hit.tangent {
                return Err(UnionError::TangentCircles(i, j));
            }
            for p in hit.points {
                let id = match nodes.iter().position(|q| surf.distance(q, &p) < MERGE_TOL) {
                    Some(id) => id,
                    None => {
                        nodes.push(p);
                        node_circles.push(Vec::new());
                        nodes.len() - 1
                    }
                };
                for k in [i, j] {
                    if !node_circles[id].contains(&k) {
                        node_circles[id].push(k);
                    }
                    if !on_circle[k].contains(&id) {
                        on_circle[k].push(id);
                    }
                }
            }
        }
    }

    let frames: Vec<(Vec3, Vec3)> = disks.iter().map(|d| surf.frame(&d.center)).collect();

    // classify arcs by testing their midpoints against the other disks
    let covered_by_other = |i: usize, x: &Point| -> Result<bool, UnionError> {
        let mut covered = false;
        for &k in &active {
            if k == i {
                continue;
            }
            let e = surf.distance(x, &disks[k].center) - disks[k].radius;
            if e.abs() <= EPS_PRED {
                return Err(UnionError::CoincidentCircles(i, k));
            }
            if e < 0.0 {
                covered = true;
            }
        }
        Ok(covered)
    };

    let mut raw_arcs: Vec<(usize, Option<(usize, usize)>, f64, f64)> = Vec::new();
    for &i in &active {
        let disk = &disks[i];
        if on_circle[i].is_empty() {
            let probe = surf.circle_point(&disk.center, &frames[i], disk.radius, 0.0);
            if !covered_by_other(i, &probe)? {
                raw_arcs.push((i, None, 0.0, TAU));
            }
            continue;
        }
        let mut around: Vec<(f64, usize)> = on_circle[i]
            .iter()
            .map(|&id| {
                let th = surf.angle_about(&disk.center, &frames[i], &nodes[id]).unwrap_or(0.0);
                (wrap(th), id)
            })
            .collect();
        around.sort_by(|a, b| a.0.total_cmp(&b.0));
        let m = around.len();
        for k in 0..m {
            let (t0, a) = around[k];
            let (t1, b) = around[(k + 1) % m];
            let mut span = t1 - t0;
            if k + 1 == m {
                span += TAU;
            }
            if m == 1 {
                span = TAU;
            }
            let mid = surf.circle_point(&disk.center, &frames[i], disk.radius, t0 + span / 2.0);
            if !covered_by_other(i, &mid)? {
                raw_arcs.push((i, Some((a, b)), t0, span));
            }
        }
    }

    if raw_arcs.is_empty() {
        return Err(UnionError::SphereCovered);
    }

    // corners are the nodes that bound at least one boundary arc
    let mut corner_of_node = vec![usize::MAX; nodes.len()];
    let mut corners: Vec<Corner> = Vec::new();
    let mut arcs = Vec::with_capacity(raw_arcs.len());
    let mut corner_id = |id: usize, corners: &mut Vec<Corner>| {
        if corner_of_node[id] == usize::MAX {
            corner_of_node[id] = corners.len();
            let mut incident = node_circles[id].clone();
            incident.sort_unstable();
            corners.push(Corner { point: nodes[id], circles: [usize::MAX; 2], incident });
        }
        corner_of_node[id]
    };
    for (disk, ends, start_angle, span) in raw_arcs {
        let (start, end) = match ends {
            Some((a, b)) => (Some(corner_id(a, &mut corners)), Some(corner_id(b, &mut corners))),
            None => (None, None),
        };
        arcs.push(BoundaryArc { disk, start, end, start_angle, span });
    }

    // boundary must be a disjoint union of simple closed curves
    let mut outgoing = vec![Vec::new(); corners.len()];
    let mut incoming = vec![Vec::new(); corners.len()];
    for (k, arc) in arcs.iter().enumerate() {
        if let (Some(s), Some(e)) = (arc.start, arc.end) {
            outgoing[s].push(k);
            incoming[e].push(k);
        }
    }
    for c in 0..corners.len() {
        if outgoing[c].len() != 1 || incoming[c].len() != 1 {
            return Err(UnionError::CornerOnThirdCircle(corners[c].incident.clone()));
        }
        corners[c].circles = [arcs[incoming[c][0]].disk, arcs[outgoing[c][0]].disk];
    }

    let mut cycles = Vec::new();
    let mut seen = vec![false; arcs.len()];
    for k in 0..arcs.len() {
        if seen[k] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = k;
        loop {
            seen[cur] = true;
            cycle.push(cur);
            match arcs[cur].end {
                None => break,
                Some(e) => {
                    cur = outgoing[e][0];
                    if cur == k {
                        break;
                    }
                }
            }
        }
        cycles.push(cycle);
    }

    let mut roots: Vec<usize> = active.iter().map(|&i| dsu.find(i)).collect();
    roots.sort_unstable();
    roots.dedup();

    Ok(BallPolytope {
        config: config.clone(),
        active,
        frames,
        corners,
        arcs,
        cycles,
        components: roots.len(),
        warnings,
    })
}

impl BallPolytope {
    pub fn config(&self) -> &BallConfiguration {
        &self.config
    }

    pub fn surface(&self) -> Surface {
        self.config.surface
    }

    /// Indices of the disks that survived redundancy elimination.
    pub fn active_disks(&self) -> &[usize] {
        &self.active
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn arcs(&self) -> &[BoundaryArc] {
        &self.arcs
    }

    /// Boundary curves as sequences of arc indices.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn warnings(&self) -> &[Redundancy] {
        &self.warnings
    }

    pub fn disk_frame(&self, disk: usize) -> &(Vec3, Vec3) {
        &self.frames[disk]
    }

    /// Point at fraction `s ∈ [0, 1]` along an arc.
    pub fn arc_point(&self, arc: &BoundaryArc, s: f64) -> Point {
        let d = &self.config.disks[arc.disk];
        self.surface()
            .circle_point(&d.center, &self.frames[arc.disk], d.radius, arc.start_angle + s * arc.span)
    }

    fn arc_distance(&self, arc: &BoundaryArc, x: &Point) -> f64 {
        let surf = self.surface();
        let d = &self.config.disks[arc.disk];
        let Some(theta) = surf.angle_about(&d.center, &self.frames[arc.disk], x) else {
            return surf.distance(x, &self.arc_point(arc, 0.0));
        };
        let rel = wrap(theta - arc.start_angle);
        if arc.is_full_circle() || rel <= arc.span {
            (surf.distance(x, &d.center) - d.radius).abs()
        } else {
            let a = &self.corners[arc.start.unwrap()].point;
            let b = &self.corners[arc.end.unwrap()].point;
            surf.distance(x, a).min(surf.distance(x, b))
        }
    }

    /// Distance from `x` to the boundary of the union.
    pub fn boundary_distance(&self, x: &Point) -> f64 {
        self.arcs
            .iter()
            .map(|a| self.arc_distance(a, x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.config.contains(p)
    }

    pub fn topology(&self) -> TopologyReport {
        let b = self.cycles.len();
        let c = self.components;
        let holes = b.saturating_sub(c);
        TopologyReport {
            component_count: c,
            hole_count: holes,
            euler_characteristic: c as i64 - holes as i64,
            simply_connected: c == 1 && holes == 0,
        }
    }

    /// Exterior turning angle at each corner.
    pub fn turning_angles(&self) -> Vec<f64> {
        let surf = self.surface();
        self.corners
            .iter()
            .map(|c| {
                let [din, dout] = c.circles;
                let u = surf.circle_tangent(&self.config.disks[din].center, &c.point);
                let v = surf.circle_tangent(&self.config.disks[dout].center, &c.point);
                surf.turn_angle(&c.point, &u, &v)
            })
            .collect()
    }

    /// `2πχ − ∫k_g − Σθ`, which equals `κ · area` by Gauss–Bonnet.
    pub fn gauss_bonnet_total(&self) -> f64 {
        let surf = self.surface();
        let chi = self.topology().euler_characteristic as f64;
        let curvature: f64 = self
            .arcs
            .iter()
            .map(|a| a.span * surf.curvature_per_radian(self.config.disks[a.disk].radius))
            .sum();
        let turning: f64 = self.turning_angles().iter().sum();
        TAU * chi - curvature - turning
    }

    pub fn union_area(&self) -> f64 {
        let surf = self.surface();
        match surf {
            Surface::Euclidean => self
                .arcs
                .iter()
                .map(|a| {
                    let d = &self.config.disks[a.disk];
                    let (cx, cy, r) = (d.center.x(), d.center.y(), d.radius);
                    let (t0, t1) = (a.start_angle, a.start_angle + a.span);
                    0.5 * (r * r * a.span + r * cx * (t1.sin() - t0.sin()) - r * cy * (t1.cos() - t0.cos()))
                })
                .sum(),
            _ => self.gauss_bonnet_total() / surf.curvature(),
        }
    }
}

pub fn union_area(poly: &BallPolytope) -> f64 {
    poly.union_area()
}

pub fn topology(poly: &BallPolytope) -> TopologyReport {
    poly.topology()
}

/// Area of the intersection of spherical disks, via the union of their
/// antipodal complements.
pub fn intersection_area_sphere(config: &BallConfiguration) -> Result<f64, UnionError> {
    if config.surface != Surface::Spherical {
        return Err(UnionError::NonSphericalSurface);
    }
    let complements: Vec<Disk> = config
        .disks
        .iter()
        .map(|d| {
            let c = d.center.vector();
            Disk::new(Point::spherical(-c.x, -c.y, -c.z).unwrap(), PI - d.radius)
        })
        .collect();
    let cfg = BallConfiguration::new(Surface::Spherical, complements)?;
    match validate(&cfg) {
        Ok(poly) => Ok((4.0 * PI - poly.union_area()).max(0.0)),
        Err(UnionError::SphereCovered) => Ok(0.0),
        Err(e) => Err(e),
    }
}
