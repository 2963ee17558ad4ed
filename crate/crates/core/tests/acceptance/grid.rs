//! Brute-force maximal-ball oracle for Euclidean disk unions on a square grid.
//!
//! The exposed arcs and corners are recomputed here from the circles alone.
//! Each grid point is labelled with the boundary feature (an open arc or a
//! corner) holding its nearest boundary point. Maximal-ball centers are the
//! points with nearest points on two unrelated features, so a grid point is
//! kept when a neighbour carries a label other than its own feature or an
//! arc meeting it at a corner.

use std::collections::HashMap;
use std::f64::consts::TAU;

use kpcentral::{BallConfiguration, CentralComplex};

const BUCKET: f64 = 0.05;

struct Buckets {
    cells: HashMap<(i64, i64), Vec<(f64, f64)>>,
}

impl Buckets {
    fn new(points: &[(f64, f64)]) -> Buckets {
        let mut cells: HashMap<(i64, i64), Vec<(f64, f64)>> = HashMap::new();
        for &p in points {
            cells.entry(key(p)).or_default().push(p);
        }
        Buckets { cells }
    }

    /// Distance to the nearest stored point, searching rings outward.
    fn nearest(&self, p: (f64, f64)) -> f64 {
        let (kx, ky) = key(p);
        let mut best = f64::INFINITY;
        for ring in 0..400i64 {
            if best < (ring as f64 - 1.0) * BUCKET {
                break;
            }
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    if let Some(v) = self.cells.get(&(kx + dx, ky + dy)) {
                        for q in v {
                            best = best.min((p.0 - q.0).hypot(p.1 - q.1));
                        }
                    }
                }
            }
        }
        best
    }
}

fn key(p: (f64, f64)) -> (i64, i64) {
    ((p.0 / BUCKET).floor() as i64, (p.1 / BUCKET).floor() as i64)
}

fn xy(config: &BallConfiguration, i: usize) -> (f64, f64, f64) {
    let d = &config.disks()[i];
    let v = d.center.vector();
    (v.x, v.y, d.radius)
}

fn inside(config: &BallConfiguration, p: (f64, f64), skip: Option<usize>) -> bool {
    (0..config.disks().len()).any(|j| {
        let (cx, cy, r) = xy(config, j);
        Some(j) != skip && (p.0 - cx).hypot(p.1 - cy) < r - 1e-12
    })
}

/// An exposed arc: circle center and radius, counterclockwise from `a` to `b`.
struct Arc {
    c: (f64, f64),
    r: f64,
    a: f64,
    b: f64,
}

impl Arc {
    fn at(&self, th: f64) -> (f64, f64) {
        (self.c.0 + self.r * th.cos(), self.c.1 + self.r * th.sin())
    }

    fn covers(&self, th: f64) -> bool {
        (th - self.a).rem_euclid(TAU) <= self.b - self.a
    }
}

fn exposed_arcs(config: &BallConfiguration) -> Vec<Arc> {
    let n = config.disks().len();
    let mut arcs = Vec::new();
    for i in 0..n {
        let (cx, cy, r) = xy(config, i);
        let mut angles = Vec::new();
        for j in 0..n {
            let (dx, dy, rj) = xy(config, j);
            let d = (dx - cx).hypot(dy - cy);
            if j == i || d >= r + rj || d <= (r - rj).abs() {
                continue;
            }
            let base = (dy - cy).atan2(dx - cx);
            let half = ((d * d + r * r - rj * rj) / (2.0 * d * r)).clamp(-1.0, 1.0).acos();
            angles.extend([(base + half).rem_euclid(TAU), (base - half).rem_euclid(TAU)]);
        }
        if angles.is_empty() {
            angles.push(0.0);
        }
        angles.sort_by(f64::total_cmp);
        for k in 0..angles.len() {
            let a = angles[k];
            let b = if k + 1 < angles.len() { angles[k + 1] } else { angles[0] + TAU };
            let mid = 0.5 * (a + b);
            if !inside(config, (cx + r * mid.cos(), cy + r * mid.sin()), Some(i)) {
                arcs.push(Arc { c: (cx, cy), r, a, b });
            }
        }
    }
    arcs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Feature {
    Arc(usize),
    Corner(usize),
}

/// Corner ids of the two ends of every arc.
fn corner_ids(arcs: &[Arc]) -> Vec<[usize; 2]> {
    let mut corners: Vec<(f64, f64)> = Vec::new();
    let mut id = |q: (f64, f64)| match corners.iter().position(|p| (p.0 - q.0).hypot(p.1 - q.1) <= 1e-9) {
        Some(k) => k,
        None => {
            corners.push(q);
            corners.len() - 1
        }
    };
    arcs.iter().map(|a| [id(a.at(a.a)), id(a.at(a.b))]).collect()
}

fn nearest_feature(arcs: &[Arc], ends: &[[usize; 2]], x: (f64, f64)) -> Feature {
    let mut best = (f64::INFINITY, Feature::Arc(0));
    for (k, arc) in arcs.iter().enumerate() {
        let s = (x.0 - arc.c.0).hypot(x.1 - arc.c.1);
        let foot = (x.1 - arc.c.1).atan2(x.0 - arc.c.0);
        // a foot counts only when it is approached from inside the disk
        if s < arc.r && arc.covers(foot) {
            let d = arc.r - s;
            if d < best.0 {
                best = (d, Feature::Arc(k));
            }
        }
        if arc.b - arc.a < TAU - 1e-12 {
            for (end, th) in [(ends[k][0], arc.a), (ends[k][1], arc.b)] {
                let q = arc.at(th);
                let d = (x.0 - q.0).hypot(x.1 - q.1);
                if d < best.0 {
                    best = (d, Feature::Corner(end));
                }
            }
        }
    }
    best.1
}

fn related(a: Feature, b: Feature, ends: &[[usize; 2]]) -> bool {
    match (a, b) {
        (Feature::Arc(i), Feature::Corner(c)) | (Feature::Corner(c), Feature::Arc(i)) => ends[i].contains(&c),
        _ => a == b,
    }
}

/// Whether a maximal-ball center lies between two neighbouring grid points.
/// The segment is bisected so that features thinner than the grid (short
/// arcs, corners of nearly tangent circles) are still seen in between.
fn separated(arcs: &[Arc], ends: &[[usize; 2]], x: (f64, f64), f: Feature, y: (f64, f64), g: Feature) -> bool {
    if related(f, g, ends) {
        return false;
    }
    if (x.0 - y.0).hypot(x.1 - y.1) < 1e-6 {
        return true;
    }
    let m = (0.5 * (x.0 + y.0), 0.5 * (x.1 + y.1));
    let k = nearest_feature(arcs, ends, m);
    separated(arcs, ends, x, f, m, k) || separated(arcs, ends, m, k, y, g)
}

/// Grid points next to a change of nearest boundary feature.
pub fn maximal_centers(config: &BallConfiguration, h: f64) -> Vec<(f64, f64)> {
    let arcs = exposed_arcs(config);
    let ends = corner_ids(&arcs);
    let n = config.disks().len();
    let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
    for i in 0..n {
        let (cx, cy, r) = xy(config, i);
        lo = (lo.0.min(cx - r), lo.1.min(cy - r));
        hi = (hi.0.max(cx + r), hi.1.max(cy + r));
    }
    let (i0, j0) = ((lo.0 / h).floor() as i64, (lo.1 / h).floor() as i64);
    let (i1, j1) = ((hi.0 / h).ceil() as i64, (hi.1 / h).ceil() as i64);
    let mut labels: HashMap<(i64, i64), Feature> = HashMap::new();
    for i in i0..=i1 {
        for j in j0..=j1 {
            let x = (i as f64 * h, j as f64 * h);
            if inside(config, x, None) {
                labels.insert((i, j), nearest_feature(&arcs, &ends, x));
            }
        }
    }
    let mut out: Vec<(f64, f64)> = labels
        .iter()
        .filter(|(&(i, j), &f)| {
            [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|(di, dj)| {
                    let (x, y) = ((i as f64 * h, j as f64 * h), ((i + di) as f64 * h, (j + dj) as f64 * h));
                    labels.get(&(i + di, j + dj)).is_some_and(|&g| separated(&arcs, &ends, x, f, y, g))
                })
        })
        .map(|(&(i, j), _)| (i as f64 * h, j as f64 * h))
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn segment_foot(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> (f64, (f64, f64)) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let q = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - q.0).hypot(p.1 - q.1), q)
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    segment_foot(p, a, b).0
}

/// Both directed Hausdorff distances between the complex and a point set:
/// (complex to points, points to complex).
pub fn hausdorff(cc: &CentralComplex, points: &[(f64, f64)]) -> (f64, f64) {
    let pt = |v: usize| {
        let p = cc.vertices[v].point.vector();
        (p.x, p.y)
    };
    let segments: Vec<((f64, f64), (f64, f64))> =
        if cc.edges.is_empty() { (0..cc.vertices.len()).map(|v| (pt(v), pt(v))).collect() } else {
            cc.edges.iter().map(|e| (pt(e.ends[0]), pt(e.ends[1]))).collect()
        };
    let mut samples: Vec<(f64, f64)> = (0..cc.vertices.len()).map(pt).collect();
    for &(a, b) in &segments {
        let m = ((b.0 - a.0).hypot(b.1 - a.1) / 0.005).ceil().max(1.0) as usize;
        samples.extend((0..=m).map(|k| {
            let t = k as f64 / m as f64;
            (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
        }));
    }
    let buckets = Buckets::new(points);
    let forward = samples.iter().map(|&s| buckets.nearest(s)).fold(0.0, f64::max);
    let backward = points
        .iter()
        .map(|&p| segments.iter().map(|&(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    (forward, backward)
}
