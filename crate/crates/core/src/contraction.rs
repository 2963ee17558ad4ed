//! Contractive rearrangements: finite center maps, piecewise isometries
//! built from geodesic folds, and refinement of a central set along the
//! cells of a piecewise isometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::central_set::{CentralComplex, CentralEdge, CentralVertex, VertexKind};
use crate::geom::{GeodesicLine, GeomError, Isometry, Point, Surface, Vec3, EPS_PRED};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ContractionError {
    #[error("center map has duplicate sources {0} and {1}")]
    InvalidMap(usize, usize),
    #[error("maps live on different surfaces")]
    MixedSurfaces,
    #[error("point is not covered by any cell")]
    PointOutsideCells,
    #[error("edge {0} leaves the cells of the map")]
    CoverageGap(usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Images of finitely many points.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterMap {
    surface: Surface,
    pairs: Vec<(Point, Point)>,
}

impl CenterMap {
    pub fn new(surface: Surface, pairs: Vec<(Point, Point)>) -> Result<CenterMap, ContractionError> {
        for (i, (p, q)) in pairs.iter().enumerate() {
            surface.check_point(p)?;
            surface.check_point(q)?;
            for (j, (r, _)) in pairs[..i].iter().enumerate() {
                if surface.distance(p, r) <= EPS_PRED {
                    return Err(ContractionError::InvalidMap(j, i));
                }
            }
        }
        Ok(CenterMap { surface, pairs })
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }
}

/// Result of the all-pairs distance check.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ContractivityReport {
    pub contractive: bool,
    /// The pair with the largest distance increase, when some pair grows.
    pub witness: Option<(usize, usize)>,
    pub max_increase: f64,
}

pub fn is_contractive(m: &CenterMap) -> ContractivityReport {
    let s = m.surface;
    let mut worst: Option<(usize, usize)> = None;
    let mut max_increase = f64::NEG_INFINITY;
    for i in 0..m.pairs.len() {
        for j in i + 1..m.pairs.len() {
            let before = s.distance(&m.pairs[i].0, &m.pairs[j].0);
            let after = s.distance(&m.pairs[i].1, &m.pairs[j].1);
            if after - before > max_increase {
                max_increase = after - before;
                worst = Some((i, j));
            }
        }
    }
    let contractive = max_increase <= EPS_PRED;
    ContractivityReport {
        contractive,
        witness: if contractive { None } else { worst },
        max_increase: max_increase.max(0.0),
    }
}

/// A convex cell `{x : c·x ≥ 0 for every c}` with the isometry used on it.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub halfspaces: Vec<Vec3>,
    pub map: Isometry,
}

impl Cell {
    pub fn contains(&self, p: &Point, eps: f64) -> bool {
        self.halfspaces.iter().all(|c| c.dot(&p.vector()) >= -eps)
    }
}

/// A continuous map that is an isometry on each of finitely many convex cells.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseIsometry {
    surface: Surface,
    cells: Vec<Cell>,
    /// Fold lines in application order.
    log: Vec<GeodesicLine>,
}

/// A sampled failure of the piecewise-isometry conditions.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub enum Defect {
    NotIsometric { cell: usize },
    Discontinuity { cells: (usize, usize), point: Vec<f64>, gap: f64 },
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct PwValidation {
    pub valid: bool,
    pub defects: Vec<Defect>,
}

impl PiecewiseIsometry {
    pub fn identity(surface: Surface) -> PiecewiseIsometry {
        PiecewiseIsometry {
            surface,
            cells: vec![Cell { halfspaces: vec![], map: Isometry::identity(surface) }],
            log: vec![],
        }
    }

    /// Two-cell map: identity on the negative side of `line`, reflection on
    /// the positive (left) side.
    pub fn fold(surface: Surface, line: &GeodesicLine) -> PiecewiseIsometry {
        let c = line.covector();
        PiecewiseIsometry {
            surface,
            cells: vec![
                Cell { halfspaces: vec![-c], map: Isometry::identity(surface) },
                Cell { halfspaces: vec![c], map: Isometry::reflection(surface, line) },
            ],
            log: vec![*line],
        }
    }

    /// `fold(lines[0]) ∘ … ∘ fold(lines[k-1])`: the last line acts first.
    pub fn from_folds(surface: Surface, lines: &[GeodesicLine]) -> PiecewiseIsometry {
        lines
            .iter()
            .rev()
            .fold(PiecewiseIsometry::identity(surface), |acc, l| {
                compose(&PiecewiseIsometry::fold(surface, l), &acc).expect("same surface")
            })
    }

    /// A map given directly by its cells; check it with [`PiecewiseIsometry::validate`].
    pub fn from_cells(surface: Surface, cells: Vec<Cell>) -> PiecewiseIsometry {
        PiecewiseIsometry { surface, cells, log: vec![] }
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn fold_lines(&self) -> &[GeodesicLine] {
        &self.log
    }

    /// Lowest-index cell containing `p`.
    pub fn cell_of(&self, p: &Point) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(p, EPS_PRED))
    }

    pub fn apply(&self, p: &Point) -> Result<Point, ContractionError> {
        let k = self.cell_of(p).ok_or(ContractionError::PointOutsideCells)?;
        Ok(self.cells[k].map.apply(p))
    }

    /// Samples points (random ones plus points on every cell wall) and checks
    /// that each cell map is an isometry and that overlapping cells agree.
    pub fn validate(&self) -> PwValidation {
        let s = self.surface;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut points = sample_points(s, &mut rng, 400);
        for cell in &self.cells {
            for c in &cell.halfspaces {
                if let Ok(line) = GeodesicLine::from_covector(s, *c) {
                    for k in -12..=12 {
                        points.push(line.point_at(s, k as f64 * 0.25));
                    }
                }
            }
        }
        let mut defects = Vec::new();
        for (k, cell) in self.cells.iter().enumerate() {
            let inside: Vec<&Point> = points.iter().filter(|p| cell.contains(p, 0.0)).take(30).collect();
            let ok = inside.windows(2).all(|w| {
                let d0 = s.distance(w[0], w[1]);
                let d1 = s.distance(&cell.map.apply(w[0]), &cell.map.apply(w[1]));
                let (a, b) = (cell.map.apply(w[0]), cell.map.apply(w[1]));
                (d0 - d1).abs() <= EPS_PRED * coordinate_scale(&a, &b)
            });
            if !ok {
                defects.push(Defect::NotIsometric { cell: k });
            }
        }
        for p in &points {
            let owners: Vec<usize> = (0..self.cells.len()).filter(|&k| self.cells[k].contains(p, 1e-10)).collect();
            for w in owners.windows(2) {
                let gap = s.distance(&self.cells[w[0]].map.apply(p), &self.cells[w[1]].map.apply(p));
                // roundoff grows with the size of hyperboloid coordinates
                if gap > EPS_PRED * p.vector().amax().max(1.0) {
                    let cells = (w[0], w[1]);
                    if !defects.iter().any(|d| matches!(d, Defect::Discontinuity { cells: c, .. } if *c == cells)) {
                        defects.push(Defect::Discontinuity { cells, point: p.coords(s), gap });
                    }
                }
            }
        }
        PwValidation { valid: defects.is_empty(), defects }
    }
}

/// Roundoff in hyperboloid distances grows with the product of coordinate sizes.
pub(crate) fn coordinate_scale(p: &Point, q: &Point) -> f64 {
    p.vector().amax().max(1.0) * q.vector().amax().max(1.0)
}

fn sample_points(s: Surface, rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    (0..n)
        .map(|_| match s {
            Surface::Euclidean => Point::euclidean(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0)),
            Surface::Spherical => loop {
                let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let n = v.norm();
                if n > 0.1 && n <= 1.0 {
                    break Point::spherical(v.x / n, v.y / n, v.z / n).unwrap();
                }
            },
            Surface::Hyperbolic => {
                let rho: f64 = rng.random_range(0.0..3.0);
                let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                Point::hyperbolic_xy(rho.sinh() * th.cos(), rho.sinh() * th.sin())
            }
        })
        .collect()
}

/// `f ∘ g` on the common refinement of the cells.
pub fn compose(f: &PiecewiseIsometry, g: &PiecewiseIsometry) -> Result<PiecewiseIsometry, ContractionError> {
    if f.surface != g.surface {
        return Err(ContractionError::MixedSurfaces);
    }
    let mut cells = Vec::with_capacity(f.cells.len() * g.cells.len());
    for gc in &g.cells {
        let gt = gc.map.matrix.transpose();
        for fc in &f.cells {
            let mut halfspaces = gc.halfspaces.clone();
            halfspaces.extend(fc.halfspaces.iter().map(|h| gt * h));
            cells.push(Cell { halfspaces, map: Isometry { surface: f.surface, matrix: fc.map.matrix * gc.map.matrix } });
        }
    }
    let mut log = g.log.clone();
    log.extend(f.log.iter().copied());
    Ok(PiecewiseIsometry { surface: f.surface, cells, log })
}

pub fn pw_apply(f: &PiecewiseIsometry, p: &Point) -> Result<Point, ContractionError> {
    f.apply(p)
}

pub fn pw_validate(f: &PiecewiseIsometry) -> PwValidation {
    f.validate()
}

/// A central set whose edges each lie where the map is a single isometry.
#[derive(Clone, Debug)]
pub struct RefinedComplex {
    pub complex: CentralComplex,
    /// Cell used on each edge.
    pub edge_cells: Vec<usize>,
}

impl RefinedComplex {
    /// Largest change of length of an edge under the map.
    pub fn edge_distortion(&self, f: &PiecewiseIsometry) -> f64 {
        let s = self.complex.surface;
        self.complex
            .edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let m = &f.cells[self.edge_cells[k]].map;
                let (a, b) = (&self.complex.vertices[e.ends[0]].point, &self.complex.vertices[e.ends[1]].point);
                let mid = self.complex.edge_point(k, 0.5);
                let direct = f.apply(&mid).map(|q| s.distance(&q, &m.apply(&mid))).unwrap_or(f64::INFINITY);
                let len = (s.distance(a, b) - s.distance(&m.apply(a), &m.apply(b))).abs();
                len.max(direct)
            })
            .fold(0.0, f64::max)
    }
}

/// Splits edges where they cross cell walls, then merges neighbouring
/// pieces that carry the same isometry.
pub fn refine_complex(f: &PiecewiseIsometry, cc: &CentralComplex) -> Result<RefinedComplex, ContractionError> {
    let s = cc.surface;
    if f.surface != s {
        return Err(ContractionError::MixedSurfaces);
    }
    let mut walls: Vec<GeodesicLine> = Vec::new();
    for cell in &f.cells {
        for c in &cell.halfspaces {
            let Ok(line) = GeodesicLine::from_covector(s, *c) else { continue };
            let dup = walls.iter().any(|w| {
                let (a, b) = (w.covector(), line.covector());
                (a - b).amax() < 1e-12 || (a + b).amax() < 1e-12
            });
            if !dup {
                walls.push(line);
            }
        }
    }

    let mut vertices: Vec<CentralVertex> = cc.vertices.clone();
    let mut edges: Vec<CentralEdge> = Vec::new();
    let mut edge_cells = Vec::new();
    for (k, e) in cc.edges.iter().enumerate() {
        let (a, b) = (cc.vertices[e.ends[0]].point, cc.vertices[e.ends[1]].point);
        let len = s.distance(&a, &b);
        let mut cuts: Vec<(f64, Point)> = Vec::new();
        for w in &walls {
            let (sa, sb) = (w.side(&a), w.side(&b));
            if sa.abs() <= 1e-9 || sb.abs() <= 1e-9 || sa * sb > 0.0 {
                continue;
            }
            if let Some(x) = s.segment_crossing(w, &a, &b) {
                let t = s.distance(&a, &x) / len;
                if t > 1e-9 && t < 1.0 - 1e-9 {
                    cuts.push((t, x));
                }
            }
        }
        cuts.sort_by(|p, q| p.0.total_cmp(&q.0));
        cuts.dedup_by(|p, q| (p.0 - q.0).abs() * len < 1e-9);

        let mut params = vec![0.0];
        params.extend(cuts.iter().map(|c| c.0));
        params.push(1.0);
        let mut piece_cells = Vec::new();
        for w in params.windows(2) {
            let mid = cc.edge_point(k, 0.5 * (w[0] + w[1]));
            piece_cells.push(f.cell_of(&mid).ok_or(ContractionError::CoverageGap(k))?);
        }

        let mut start = e.ends[0];
        let mut cell = piece_cells[0];
        for (i, &next_cell) in piece_cells.iter().enumerate().skip(1) {
            if f.cells[next_cell].map.approx_eq(&f.cells[cell].map, 1e-12) {
                continue;
            }
            let point = cuts[i - 1].1;
            let radius = s.distance(&point, &cc.lambda[e.corners[0]]);
            let id = vertices.len();
            vertices.push(CentralVertex { point, radius, kind: VertexKind::Subdivision, touching: e.corners.to_vec() });
            edges.push(CentralEdge { ends: [start, id], corners: e.corners });
            edge_cells.push(cell);
            start = id;
            cell = next_cell;
        }
        edges.push(CentralEdge { ends: [start, e.ends[1]], corners: e.corners });
        edge_cells.push(cell);
    }
    Ok(RefinedComplex { complex: CentralComplex::from_parts(cc, vertices, edges), edge_cells })
}
