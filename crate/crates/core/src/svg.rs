//! SVG figures of disk unions and their central sets.
//!
//! Euclidean scenes are drawn as they are, spherical ones by orthographic
//! projection along the mean disk center, hyperbolic ones in the Klein model
//! where geodesics are straight.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::ball_union::BallConfiguration;
use crate::central_set::CentralComplex;
use crate::geom::{Point, Surface, Vec3};

const SIZE: f64 = 600.0;
const OUTLINE_STEPS: usize = 96;
const EDGE_STEPS: usize = 32;

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

struct Projection {
    surface: Surface,
    e1: Vec3,
    e2: Vec3,
}

impl Projection {
    fn new(config: &BallConfiguration) -> Projection {
        let surface = config.surface();
        let (e1, e2) = match surface {
            Surface::Spherical => {
                let sum: Vec3 = config.disks().iter().map(|d| d.center.vector()).sum();
                let view = if sum.norm() > 1e-6 { sum.normalize() } else { Vec3::z() };
                let helper = if view.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
                let e1 = helper.cross(&view).normalize();
                (e1, view.cross(&e1))
            }
            _ => (Vec3::x(), Vec3::y()),
        };
        Projection { surface, e1, e2 }
    }

    fn apply(&self, p: &Point) -> (f64, f64) {
        let v = p.vector();
        match self.surface {
            Surface::Euclidean => (v.x, v.y),
            Surface::Spherical => (v.dot(&self.e1), v.dot(&self.e2)),
            Surface::Hyperbolic => (v.x / v.z, v.y / v.z),
        }
    }
}

struct Canvas {
    min: (f64, f64),
    scale: f64,
    height: f64,
}

impl Canvas {
    fn fit(points: &[(f64, f64)]) -> Canvas {
        let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
        for &(x, y) in points {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
        let pad = 0.05 * span;
        let scale = SIZE / (span + 2.0 * pad);
        Canvas { min: (lo.0 - pad, lo.1 - pad), scale, height: (hi.1 - lo.1 + 2.0 * pad) * scale }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.min.0) * self.scale, self.height - (y - self.min.1) * self.scale)
    }
}

fn outline(surface: Surface, center: &Point, radius: f64) -> Vec<Point> {
    let frame = surface.frame(center);
    (0..OUTLINE_STEPS)
        .map(|k| surface.circle_point(center, &frame, radius, std::f64::consts::TAU * k as f64 / OUTLINE_STEPS as f64))
        .collect()
}

/// The SVG text for a configuration and, optionally, its central set.
pub fn svg_document(config: &BallConfiguration, cc: Option<&CentralComplex>) -> String {
    let s = config.surface();
    let proj = Projection::new(config);
    let outlines: Vec<Vec<(f64, f64)>> =
        config.disks().iter().map(|d| outline(s, &d.center, d.radius).iter().map(|p| proj.apply(p)).collect()).collect();
    let mut all: Vec<(f64, f64)> = outlines.iter().flatten().copied().collect();
    if s != Surface::Euclidean {
        all.extend([(-1.0, -1.0), (1.0, 1.0)]);
    }
    let canvas = Canvas::fit(&all);
    let fmt = |p: (f64, f64)| {
        let (x, y) = canvas.map(p);
        format!("{x:.3},{y:.3}")
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE:.0}\" height=\"{:.0}\" viewBox=\"0 0 {SIZE:.3} {:.3}\">",
        canvas.height, canvas.height
    );
    out.push_str("<style>.disk{fill:#7aa6d8;fill-opacity:0.35;stroke:#2b5d8f;stroke-width:1}.edge{stroke:#b22222;stroke-width:2;fill:none}.corner{fill:#222}.model{fill:none;stroke:#999;stroke-dasharray:4 3}</style>\n");

    if s != Surface::Euclidean {
        let (cx, cy) = canvas.map((0.0, 0.0));
        let _ = writeln!(out, "<circle class=\"model\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{:.3}\"/>", canvas.scale);
    }
    for (d, pts) in config.disks().iter().zip(&outlines) {
        if s == Surface::Euclidean {
            let (cx, cy) = canvas.map((d.center.vector().x, d.center.vector().y));
            let _ = writeln!(out, "<circle class=\"disk\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{:.3}\"/>", d.radius * canvas.scale);
        } else {
            let path: Vec<String> = pts.iter().map(|&p| fmt(p)).collect();
            let _ = writeln!(out, "<polygon class=\"disk\" points=\"{}\"/>", path.join(" "));
        }
    }

    if let Some(cc) = cc {
        for e in 0..cc.edges.len() {
            let [a, b] = cc.edges[e].ends;
            if s == Surface::Spherical {
                let path: Vec<String> =
                    (0..=EDGE_STEPS).map(|k| fmt(proj.apply(&cc.edge_point(e, k as f64 / EDGE_STEPS as f64)))).collect();
                let _ = writeln!(out, "<polyline class=\"edge\" points=\"{}\"/>", path.join(" "));
            } else {
                let (x1, y1) = canvas.map(proj.apply(&cc.vertices[a].point));
                let (x2, y2) = canvas.map(proj.apply(&cc.vertices[b].point));
                let _ = writeln!(out, "<line class=\"edge\" x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\"/>");
            }
        }
        for c in cc.source().corners() {
            let (x, y) = canvas.map(proj.apply(&c.point));
            let _ = writeln!(out, "<rect class=\"corner\" x=\"{:.3}\" y=\"{:.3}\" width=\"6\" height=\"6\"/>", x - 3.0, y - 3.0);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Writes [`svg_document`] to `path` and returns the text.
pub fn svg_export(config: &BallConfiguration, cc: Option<&CentralComplex>, path: &Path) -> Result<String, SvgError> {
    let doc = svg_document(config, cc);
    std::fs::write(path, &doc).map_err(|source| SvgError::Io { path: path.display().to_string(), source })?;
    Ok(doc)
}
