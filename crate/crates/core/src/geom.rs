//! Geometric primitives shared by the three constant-curvature surfaces.
//!
//! Points live in a single 3-vector representation so that bisectors,
//! reflections and isometries are plain (pseudo-)orthogonal linear algebra:
//!
//! * Euclidean plane: homogeneous coordinates `(x, y, 1)`.
//! * Unit sphere: unit vectors in R^3.
//! * Hyperbolic plane: the upper sheet of the hyperboloid `x^2 + y^2 - z^2 = -1`.
//!
//! A geodesic line is stored as a covector `l` with incidence `l . x = 0` and a
//! normal vector `m`; the reflection across it is `x - 2 (l . x) m` in every model.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance applied by point constructors.
pub const EPS_MODEL: f64 = 1e-12;
/// Tolerance for incidence predicates.
pub const EPS_PRED: f64 = 1e-9;
/// Tolerance for area comparisons.
pub const EPS_AREA: f64 = 1e-6;

pub type Vec3 = Vector3<f64>;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("point {0:?} violates the {1:?} model constraint")]
    InvalidPoint([f64; 3], Surface),
    #[error("radius {0} is out of range on the {1:?} surface")]
    InvalidRadius(f64, Surface),
    #[error("antipodal points have no unique minimizing geodesic")]
    AmbiguousGeodesic,
    #[error("circles coincide")]
    DegenerateCoincident,
    #[error("points are geodesically collinear, no circumcenter exists")]
    NoCircumcenter,
    #[error("bisector of coincident or antipodal points is undefined")]
    DegenerateBisector,
    #[error("geodesic line needs two distinct, non-antipodal points")]
    DegenerateLine,
    #[error("arguments live on different surfaces ({0:?} vs {1:?})")]
    MixedSurfaces(Surface, Surface),
}

/// The constant-curvature surface every computation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Euclidean,
    Spherical,
    Hyperbolic,
}

/// A point in the model of its surface. The surface is not stored; callers
/// pass it to every operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point(Vec3);

impl Point {
    pub fn euclidean(x: f64, y: f64) -> Point {
        Point(Vec3::new(x, y, 1.0))
    }

    /// Normalizes onto the unit sphere.
    pub fn spherical(x: f64, y: f64, z: f64) -> Result<Point, GeomError> {
        let v = Vec3::new(x, y, z);
        let n = v.norm();
        if !n.is_finite() || n < 1e-300 {
            return Err(GeomError::InvalidPoint([x, y, z], Surface::Spherical));
        }
        Ok(Point(v / n))
    }

    /// Rescales a future-timelike vector onto the hyperboloid sheet.
    pub fn hyperbolic(x: f64, y: f64, z: f64) -> Result<Point, GeomError> {
        let q = z * z - x * x - y * y;
        if !q.is_finite() || q <= 0.0 || z <= 0.0 {
            return Err(GeomError::InvalidPoint([x, y, z], Surface::Hyperbolic));
        }
        Ok(Point(Vec3::new(x, y, z) / q.sqrt()))
    }

    /// Hyperboloid point above `(x, y)`.
    pub fn hyperbolic_xy(x: f64, y: f64) -> Point {
        Point(Vec3::new(x, y, (1.0 + x * x + y * y).sqrt()))
    }

    /// Builds a point from model coordinates: two numbers on the plane,
    /// three on the sphere and hyperboloid.
    pub fn from_coords(surface: Surface, coords: &[f64]) -> Result<Point, GeomError> {
        let bad = || {
            let mut a = [f64::NAN; 3];
            for (slot, c) in a.iter_mut().zip(coords) {
                *slot = *c;
            }
            GeomError::InvalidPoint(a, surface)
        };
        match (surface, coords.len()) {
            (Surface::Euclidean, 2) if coords.iter().all(|c| c.is_finite()) => {
                Ok(Point::euclidean(coords[0], coords[1]))
            }
            (Surface::Spherical, 3) => {
                let p = Point::spherical(coords[0], coords[1], coords[2])?;
                let raw = Vec3::new(coords[0], coords[1], coords[2]);
                if (raw.norm() - 1.0).abs() > 1e-6 {
                    return Err(bad());
                }
                Ok(p)
            }
            (Surface::Hyperbolic, 3) => {
                let p = Point::hyperbolic(coords[0], coords[1], coords[2])?;
                let q = coords[2] * coords[2] - coords[0] * coords[0] - coords[1] * coords[1];
                if (q - 1.0).abs() > 1e-6 * coords[2] * coords[2] {
                    return Err(bad());
                }
                Ok(p)
            }
            _ => Err(bad()),
        }
    }

    /// Model coordinates as written in scene files.
    pub fn coords(&self, surface: Surface) -> Vec<f64> {
        match surface {
            Surface::Euclidean => vec![self.0.x, self.0.y],
            _ => vec![self.0.x, self.0.y, self.0.z],
        }
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }

    #[cfg(test)]
    pub(crate) fn from_vector_unchecked(v: Vec3) -> Point {
        Point(v)
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }
    pub fn y(&self) -> f64 {
        self.0.y
    }
    pub fn z(&self) -> f64 {
        self.0.z
    }
}

/// A closed geodesic disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Disk {
        Disk { center, radius }
    }
}

/// A complete geodesic. `covector . x` is a signed side function whose
/// magnitude is `d`, `sin d` or `sinh d` of the distance to the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicLine {
    pub points: [Point; 2],
    covector: Vec3,
    normal: Vec3,
}

impl GeodesicLine {
    pub fn covector(&self) -> Vec3 {
        self.covector
    }

    pub fn side(&self, p: &Point) -> f64 {
        self.covector.dot(&p.0)
    }

    /// Reconstructs the line from a normalized covector (as stored in cells).
    pub fn from_covector(surface: Surface, c: Vec3) -> Result<GeodesicLine, GeomError> {
        let (normal, base) = match surface {
            Surface::Euclidean => {
                let n = (c.x * c.x + c.y * c.y).sqrt();
                if n < 1e-300 {
                    return Err(GeomError::DegenerateLine);
                }
                let c = c / n;
                (Vec3::new(c.x, c.y, 0.0), Point::euclidean(-c.z * c.x, -c.z * c.y))
            }
            Surface::Spherical => {
                let n = c.norm();
                if n < 1e-300 {
                    return Err(GeomError::DegenerateLine);
                }
                let m = c / n;
                let axis = least_aligned_axis(&m);
                let b = (axis - m * m.dot(&axis)).normalize();
                (m, Point(b))
            }
            Surface::Hyperbolic => {
                let m = jmul(&c);
                let q = lorentz(&m, &m);
                if q <= 1e-300 {
                    return Err(GeomError::DegenerateLine);
                }
                let m = m / q.sqrt();
                let o = Vec3::new(0.0, 0.0, 1.0);
                let b = o - m * lorentz(&m, &o) / lorentz(&m, &m);
                let b = b / (-lorentz(&b, &b)).sqrt();
                (m, Point(b))
            }
        };
        let dir = surface.rotate90(&base, &normal);
        let other = surface.exp(&base, &dir, 1.0);
        Ok(GeodesicLine::assemble(surface, [base, other], normal))
    }

    fn assemble(surface: Surface, points: [Point; 2], normal: Vec3) -> GeodesicLine {
        let covector = match surface {
            Surface::Euclidean => {
                let p = points[0].0;
                Vec3::new(normal.x, normal.y, -(normal.x * p.x + normal.y * p.y))
            }
            Surface::Spherical => normal,
            Surface::Hyperbolic => jmul(&normal),
        };
        GeodesicLine { points, covector, normal }
    }

    /// Point at signed arc length `t` from the first defining point.
    pub fn point_at(&self, surface: Surface, t: f64) -> Point {
        let base = self.points[0];
        let dir = surface.rotate90(&base, &surface.unit_normal_at(&base, self));
        surface.exp(&base, &dir, t)
    }
}

/// Matrix acting on model coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    pub surface: Surface,
    pub matrix: Matrix3<f64>,
}

impl Isometry {
    pub fn identity(surface: Surface) -> Isometry {
        Isometry { surface, matrix: Matrix3::identity() }
    }

    pub fn reflection(surface: Surface, line: &GeodesicLine) -> Isometry {
        Isometry {
            surface,
            matrix: Matrix3::identity() - 2.0 * line.normal * line.covector.transpose(),
        }
    }

    /// Rigid motion taking the surface origin to `c`.
    pub fn translation_to(surface: Surface, c: &Point) -> Isometry {
        let v = c.0;
        let matrix = match surface {
            Surface::Euclidean => Matrix3::new(1.0, 0.0, v.x, 0.0, 1.0, v.y, 0.0, 0.0, 1.0),
            Surface::Spherical => {
                // rotation in the plane of e_z and c
                let z = Vec3::new(0.0, 0.0, 1.0);
                let axis = z.cross(&v);
                let s = axis.norm();
                let cth = v.z;
                if s < 1e-15 {
                    if cth > 0.0 {
                        Matrix3::identity()
                    } else {
                        Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0)
                    }
                } else {
                    let k = axis / s;
                    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
                    Matrix3::identity() + s * kx + (1.0 - cth) * kx * kx
                }
            }
            Surface::Hyperbolic => {
                let (x, y, z) = (v.x, v.y, v.z);
                let w = 1.0 + z;
                Matrix3::new(
                    1.0 + x * x / w,
                    x * y / w,
                    x,
                    x * y / w,
                    1.0 + y * y / w,
                    y,
                    x,
                    y,
                    z,
                )
            }
        };
        Isometry { surface, matrix }
    }

    pub fn apply(&self, p: &Point) -> Point {
        self.surface.renormalize(self.matrix * p.0)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry, GeomError> {
        if self.surface != other.surface {
            return Err(GeomError::MixedSurfaces(self.surface, other.surface));
        }
        Ok(Isometry { surface: self.surface, matrix: self.matrix * other.matrix })
    }

    pub fn inverse(&self) -> Isometry {
        let matrix = self.matrix.try_inverse().unwrap_or_else(Matrix3::identity);
        Isometry { surface: self.surface, matrix }
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        (self.matrix - other.matrix).amax() <= tol
    }
}

/// Result of intersecting two circles.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleIntersection {
    pub points: Vec<Point>,
    pub tangent: bool,
}

#[inline]
fn jmul(v: &Vec3) -> Vec3 {
    Vec3::new(v.x, v.y, -v.z)
}

#[inline]
fn lorentz(a: &Vec3, b: &Vec3) -> f64 {
    a.x * b.x + a.y * b.y - a.z * b.z
}

fn least_aligned_axis(v: &Vec3) -> Vec3 {
    let a = v.abs();
    if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    }
}

impl Surface {
    pub fn curvature(&self) -> f64 {
        match self {
            Surface::Euclidean => 0.0,
            Surface::Spherical => 1.0,
            Surface::Hyperbolic => -1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Surface::Euclidean => "euclidean",
            Surface::Spherical => "spherical",
            Surface::Hyperbolic => "hyperbolic",
        }
    }

    pub fn origin(&self) -> Point {
        match self {
            Surface::Euclidean => Point::euclidean(0.0, 0.0),
            _ => Point(Vec3::new(0.0, 0.0, 1.0)),
        }
    }

    /// Bilinear form on tangent vectors (the metric restricted to the model).
    #[inline]
    pub fn form(&self, a: &Vec3, b: &Vec3) -> f64 {
        match self {
            Surface::Euclidean => a.x * b.x + a.y * b.y,
            Surface::Spherical => a.dot(b),
            Surface::Hyperbolic => lorentz(a, b),
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<(), GeomError> {
        let v = p.0;
        let ok = v.iter().all(|c| c.is_finite())
            && match self {
                Surface::Euclidean => (v.z - 1.0).abs() <= EPS_MODEL,
                Surface::Spherical => (v.norm_squared() - 1.0).abs() <= 1e-10,
                Surface::Hyperbolic => {
                    v.z > 0.0 && (lorentz(&v, &v) + 1.0).abs() <= 1e-10 * v.z * v.z
                }
            };
        if ok {
            Ok(())
        } else {
            Err(GeomError::InvalidPoint([v.x, v.y, v.z], *self))
        }
    }

    pub(crate) fn renormalize(&self, v: Vec3) -> Point {
        match self {
            Surface::Euclidean => Point(Vec3::new(v.x / v.z, v.y / v.z, 1.0)),
            Surface::Spherical => Point(v / v.norm()),
            Surface::Hyperbolic => {
                let q = -lorentz(&v, &v);
                let v = if v.z < 0.0 { -v } else { v };
                Point(v / q.sqrt())
            }
        }
    }

    /// Intrinsic distance. Inputs are trusted; see [`Surface::try_distance`].
    #[inline]
    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        let (a, b) = (p.0, q.0);
        match self {
            Surface::Euclidean => (a.x - b.x).hypot(a.y - b.y),
            Surface::Spherical => a.cross(&b).norm().atan2(a.dot(&b)),
            Surface::Hyperbolic => {
                let w = a - b;
                let s = lorentz(&w, &w).max(0.0);
                2.0 * (s.sqrt() / 2.0).asinh()
            }
        }
    }

    pub fn try_distance(&self, p: &Point, q: &Point) -> Result<f64, GeomError> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.distance(p, q))
    }

    /// Unit tangent at `c` pointing toward `q`. Undefined (zero) when `q == c`.
    pub fn unit_toward(&self, c: &Point, q: &Point) -> Vec3 {
        let (c, q) = (c.0, q.0);
        let t = match self {
            Surface::Euclidean => Vec3::new(q.x - c.x, q.y - c.y, 0.0),
            Surface::Spherical => q - c * c.dot(&q),
            Surface::Hyperbolic => q + c * lorentz(&c, &q),
        };
        let n = self.form(&t, &t).max(0.0).sqrt();
        if n < 1e-300 {
            Vec3::zeros()
        } else {
            t / n
        }
    }

    /// Rotates the tangent vector `u` at `c` by a quarter turn counterclockwise.
    #[inline]
    pub fn rotate90(&self, c: &Point, u: &Vec3) -> Vec3 {
        match self {
            Surface::Euclidean => Vec3::new(-u.y, u.x, 0.0),
            Surface::Spherical => c.0.cross(u),
            Surface::Hyperbolic => jmul(&c.0.cross(u)),
        }
    }

    /// Exponential map: walk distance `r` from `c` along unit tangent `u`.
    #[inline]
    pub fn exp(&self, c: &Point, u: &Vec3, r: f64) -> Point {
        let c = c.0;
        match self {
            Surface::Euclidean => Point(Vec3::new(c.x + r * u.x, c.y + r * u.y, 1.0)),
            Surface::Spherical => self.renormalize(c * r.cos() + u * r.sin()),
            Surface::Hyperbolic => self.renormalize(c * r.cosh() + u * r.sinh()),
        }
    }

    /// An orthonormal, positively oriented tangent frame at `c`.
    pub fn frame(&self, c: &Point) -> (Vec3, Vec3) {
        let e1 = match self {
            Surface::Euclidean => Vec3::new(1.0, 0.0, 0.0),
            Surface::Spherical => {
                let a = least_aligned_axis(&c.0);
                (a - c.0 * c.0.dot(&a)).normalize()
            }
            Surface::Hyperbolic => {
                let a = Vec3::x();
                let t = a + c.0 * lorentz(&c.0, &a);
                t / lorentz(&t, &t).sqrt()
            }
        };
        let e2 = self.rotate90(c, &e1);
        (e1, e2)
    }

    /// Point at angle `theta` on the circle of radius `r` about `c`.
    pub fn circle_point(&self, c: &Point, frame: &(Vec3, Vec3), r: f64, theta: f64) -> Point {
        let u = frame.0 * theta.cos() + frame.1 * theta.sin();
        self.exp(c, &u, r)
    }

    /// Polar angle of `x` as seen from `c` in the given frame; `None` when
    /// the direction is undefined.
    pub fn angle_about(&self, c: &Point, frame: &(Vec3, Vec3), x: &Point) -> Option<f64> {
        let u = self.unit_toward(c, x);
        if u == Vec3::zeros() {
            return None;
        }
        Some(self.form(&u, &frame.1).atan2(self.form(&u, &frame.0)))
    }

    /// Counterclockwise unit tangent at `x` of the circle centered at `c`.
    pub fn circle_tangent(&self, c: &Point, x: &Point) -> Vec3 {
        let inward = self.unit_toward(x, c);
        self.rotate90(x, &(-inward))
    }

    /// Signed angle at `x` turning tangent `u` into tangent `v`.
    pub fn turn_angle(&self, x: &Point, u: &Vec3, v: &Vec3) -> f64 {
        let s = self.form(&self.rotate90(x, u), v);
        let c = self.form(u, v);
        s.atan2(c)
    }

    fn unit_normal_at(&self, x: &Point, line: &GeodesicLine) -> Vec3 {
        match self {
            Surface::Euclidean => line.normal,
            _ => {
                let m = line.normal;
                let t = match self {
                    Surface::Spherical => m - x.0 * x.0.dot(&m),
                    _ => m + x.0 * lorentz(&x.0, &m),
                };
                t / self.form(&t, &t).sqrt()
            }
        }
    }

    /// Point at fraction `t` along the minimizing geodesic from `p` to `q`.
    pub fn geodesic_eval(&self, p: &Point, q: &Point, t: f64) -> Result<Point, GeomError> {
        let d = self.distance(p, q);
        if *self == Surface::Spherical && d > PI - 1e-9 {
            return Err(GeomError::AmbiguousGeodesic);
        }
        Ok(self.geodesic_eval_unchecked(p, q, d, t))
    }

    pub(crate) fn geodesic_eval_unchecked(&self, p: &Point, q: &Point, d: f64, t: f64) -> Point {
        if d < 1e-15 {
            return *p;
        }
        match self {
            Surface::Euclidean => Point(p.0 * (1.0 - t) + q.0 * t),
            Surface::Spherical => {
                let s = d.sin();
                self.renormalize((p.0 * ((1.0 - t) * d).sin() + q.0 * (t * d).sin()) / s)
            }
            Surface::Hyperbolic => {
                let s = d.sinh();
                self.renormalize((p.0 * ((1.0 - t) * d).sinh() + q.0 * (t * d).sinh()) / s)
            }
        }
    }

    pub fn disk_area(&self, r: f64) -> Result<f64, GeomError> {
        if !(r >= 0.0) || !r.is_finite() || (*self == Surface::Spherical && r >= PI) {
            return Err(GeomError::InvalidRadius(r, *self));
        }
        Ok(match self {
            Surface::Euclidean => PI * r * r,
            // 2π(1 − cos r) written to avoid cancellation
            Surface::Spherical => 4.0 * PI * (r / 2.0).sin().powi(2),
            Surface::Hyperbolic => 4.0 * PI * (r / 2.0).sinh().powi(2),
        })
    }

    /// Perimeter of a circle of radius `r`.
    pub fn circumference(&self, r: f64) -> f64 {
        2.0 * PI * self.radial_scale(r)
    }

    /// `r`, `sin r` or `sinh r`.
    pub fn radial_scale(&self, r: f64) -> f64 {
        match self {
            Surface::Euclidean => r,
            Surface::Spherical => r.sin(),
            Surface::Hyperbolic => r.sinh(),
        }
    }

    /// Total geodesic curvature per radian of a radius-`r` circle:
    /// `k_g · sin r` etc., i.e. `1`, `cos r`, `cosh r`.
    pub fn curvature_per_radian(&self, r: f64) -> f64 {
        match self {
            Surface::Euclidean => 1.0,
            Surface::Spherical => r.cos(),
            Surface::Hyperbolic => r.cosh(),
        }
    }

    /// Boundary circles of two disks.
    pub fn circle_intersections(&self, d1: &Disk, d2: &Disk) -> Result<CircleIntersection, GeomError> {
        let (r1, r2) = (d1.radius, d2.radius);
        let d = self.distance(&d1.center, &d2.center);
        let coincident = (d < EPS_PRED && (r1 - r2).abs() < EPS_PRED)
            || (*self == Surface::Spherical
                && (d - PI).abs() < EPS_PRED
                && (r1 + r2 - PI).abs() < EPS_PRED);
        if coincident {
            return Err(GeomError::DegenerateCoincident);
        }
        let mut hi = r1 + r2;
        if *self == Surface::Spherical {
            hi = hi.min(2.0 * PI - r1 - r2);
        }
        let lo = (r1 - r2).abs();
        if d > hi + EPS_PRED || d < lo - EPS_PRED {
            return Ok(CircleIntersection { points: vec![], tangent: false });
        }
        let tangent = (d - hi).abs() <= EPS_PRED || (d - lo).abs() <= EPS_PRED;
        // angle at c1 between the direction to c2 and the intersection points
        let cos_a = match self {
            Surface::Euclidean => (r1 * r1 + d * d - r2 * r2) / (2.0 * r1 * d),
            Surface::Spherical => (r2.cos() - r1.cos() * d.cos()) / (r1.sin() * d.sin()),
            Surface::Hyperbolic => (r1.cosh() * d.cosh() - r2.cosh()) / (r1.sinh() * d.sinh()),
        };
        let alpha = cos_a.clamp(-1.0, 1.0).acos();
        let u = self.unit_toward(&d1.center, &d2.center);
        let v = self.rotate90(&d1.center, &u);
        let at = |a: f64| self.exp(&d1.center, &(u * a.cos() + v * a.sin()), r1);
        let points = if tangent { vec![at(if cos_a >= 0.0 { 0.0 } else { PI })] } else { vec![at(alpha), at(-alpha)] };
        Ok(CircleIntersection { points, tangent })
    }

    /// Points equidistant from three points (circumcenters).
    pub fn equidistant_points(&self, a: &Point, b: &Point, c: &Point) -> Result<Vec<Point>, GeomError> {
        let (a, b, c) = (a.0, b.0, c.0);
        match self {
            Surface::Euclidean => {
                let (bx, by) = (b.x - a.x, b.y - a.y);
                let (cx, cy) = (c.x - a.x, c.y - a.y);
                let det = 2.0 * (bx * cy - by * cx);
                let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
                if det.abs() <= 1e-14 * scale.max(1e-300) {
                    return Err(GeomError::NoCircumcenter);
                }
                let b2 = bx * bx + by * by;
                let c2 = cx * cx + cy * cy;
                let ux = (cy * b2 - by * c2) / det;
                let uy = (bx * c2 - cx * b2) / det;
                Ok(vec![Point::euclidean(a.x + ux, a.y + uy)])
            }
            Surface::Spherical => {
                let n = (b - a).cross(&(c - a));
                let len = n.norm();
                if len < 1e-15 {
                    return Err(GeomError::NoCircumcenter);
                }
                let n = n / len;
                Ok(vec![Point(n), Point(-n)])
            }
            Surface::Hyperbolic => {
                let n = jmul(&(b - a).cross(&(c - a)));
                let q = lorentz(&n, &n);
                if q >= -1e-15 * n.norm_squared() {
                    return Err(GeomError::NoCircumcenter);
                }
                let n = if n.z < 0.0 { -n } else { n };
                Ok(vec![Point(n / (-q).sqrt())])
            }
        }
    }

    /// Perpendicular bisector; the positive side is closer to `a`.
    pub fn bisector(&self, a: &Point, b: &Point) -> Result<GeodesicLine, GeomError> {
        let d = self.distance(a, b);
        if d < EPS_PRED || (*self == Surface::Spherical && d > PI - EPS_PRED) {
            return Err(GeomError::DegenerateBisector);
        }
        let mid = self.geodesic_eval_unchecked(a, b, d, 0.5);
        let m = self.unit_toward(&mid, a);
        let dir = self.rotate90(&mid, &m);
        let other = self.exp(&mid, &dir, 1.0);
        Ok(GeodesicLine::assemble(*self, [mid, other], m))
    }

    /// The geodesic through `p` and `q`; its positive side is on the left of `p → q`.
    pub fn line_through(&self, p: &Point, q: &Point) -> Result<GeodesicLine, GeomError> {
        let d = self.distance(p, q);
        if d < EPS_PRED || (*self == Surface::Spherical && d > PI - EPS_PRED) {
            return Err(GeomError::DegenerateLine);
        }
        let u = self.unit_toward(p, q);
        let m = self.rotate90(p, &u);
        Ok(GeodesicLine::assemble(*self, [*p, *q], m))
    }

    pub fn reflect(&self, line: &GeodesicLine, p: &Point) -> Point {
        let s = line.side(p);
        self.renormalize(p.0 - line.normal * (2.0 * s))
    }

    /// Where the geodesic segment `p → q` meets `line`, given opposite signs
    /// of the side function at its ends.
    pub fn segment_crossing(&self, line: &GeodesicLine, p: &Point, q: &Point) -> Option<Point> {
        let (sp, sq) = (line.side(p), line.side(q));
        if sp * sq > 0.0 || (sp == 0.0 && sq == 0.0) {
            return None;
        }
        let (wp, wq) = (sq.abs(), sp.abs());
        let v = match self {
            Surface::Euclidean => (p.0 * wp + q.0 * wq) / (wp + wq),
            _ => p.0 * wp + q.0 * wq,
        };
        Some(self.renormalize(v))
    }

    /// Random-looking but deterministic isometry built from reflections.
    pub fn reflection_product(&self, lines: &[GeodesicLine]) -> Isometry {
        lines.iter().fold(Isometry::identity(*self), |acc, l| Isometry {
            surface: *self,
            matrix: Isometry::reflection(*self, l).matrix * acc.matrix,
        })
    }
}
