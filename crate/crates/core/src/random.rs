//! Seeded generators of well-conditioned scenes and fold maps.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball_union::{validate, BallConfiguration, BallPolytope};
use crate::geom::{Disk, GeodesicLine, Point, Surface};
use crate::scene::{ContractionSpec, Scene};

const MAX_ATTEMPTS: usize = 10_000;
/// Minimal gap kept away from tangencies and coincidences.
const MARGIN: f64 = 2e-3;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GenerationError {
    #[error("no acceptable scene after {0} attempts")]
    GenerationFailure(usize),
    #[error("disk count must be between 2 and 10, got {0}")]
    BadCount(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Want {
    SimplyConnected,
    Any,
}

/// Shape parameters of [`random_scene_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneParams {
    pub radius: (f64, f64),
    /// Center offset of each new disk from an existing one, as a fraction of
    /// the sum of their radii.
    pub offset: (f64, f64),
}

impl SceneParams {
    pub fn default_for(surface: Surface) -> SceneParams {
        match surface {
            Surface::Euclidean => SceneParams { radius: (0.5, 1.2), offset: (0.45, 0.85) },
            Surface::Spherical => SceneParams { radius: (0.3, 0.9), offset: (0.45, 0.85) },
            Surface::Hyperbolic => SceneParams { radius: (0.4, 1.0), offset: (0.45, 0.85) },
        }
    }
}

fn base_point(surface: Surface, rng: &mut ChaCha8Rng, spread: f64) -> Point {
    let o = surface.origin();
    let dist = rng.random_range(0.0..spread);
    random_step(surface, rng, &o, dist)
}

fn random_step(surface: Surface, rng: &mut ChaCha8Rng, from: &Point, dist: f64) -> Point {
    let th: f64 = rng.random_range(0.0..TAU);
    let (u, v) = surface.frame(from);
    surface.exp(from, &(u * th.cos() + v * th.sin()), dist)
}

/// Rejects configurations that are close to a degenerate one.
pub fn well_conditioned(config: &BallConfiguration) -> Option<BallPolytope> {
    let s = config.surface();
    let d = config.disks();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let dist = s.distance(&d[i].center, &d[j].center);
            let (ri, rj) = (d[i].radius, d[j].radius);
            if (dist - ri - rj).abs() < MARGIN || (dist - (ri - rj).abs()).abs() < MARGIN {
                return None;
            }
            if s == Surface::Spherical && (dist - (TAU - ri - rj)).abs() < MARGIN {
                return None;
            }
        }
    }
    let poly = validate(config).ok()?;
    if !poly.warnings().is_empty() {
        return None;
    }
    let corners = poly.corners();
    for (a, ca) in corners.iter().enumerate() {
        if ca.incident.len() != 2 {
            return None;
        }
        if corners[a + 1..].iter().any(|cb| s.distance(&ca.point, &cb.point) < MARGIN) {
            return None;
        }
        for (k, disk) in d.iter().enumerate() {
            if !ca.incident.contains(&k) && (s.distance(&ca.point, &disk.center) - disk.radius).abs() < MARGIN {
                return None;
            }
        }
    }
    if poly.arcs().iter().any(|a| a.span < MARGIN) {
        return None;
    }
    Some(poly)
}

fn scene_from(surface: Surface, disks: &[Disk], seed: u64, label: String) -> Scene {
    Scene::from_disks(surface, disks, Some(label), Some(seed))
}

pub fn random_scene(surface: Surface, k: usize, seed: u64, want: Want) -> Result<Scene, GenerationError> {
    random_scene_with(surface, k, seed, want, SceneParams::default_for(surface))
}

/// Disks attached one at a time to the growing union, resampled until the
/// union is well conditioned and has the wanted topology.
pub fn random_scene_with(
    surface: Surface,
    k: usize,
    seed: u64,
    want: Want,
    params: SceneParams,
) -> Result<Scene, GenerationError> {
    if !(2..=10).contains(&k) {
        return Err(GenerationError::BadCount(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut disks: Vec<Disk> = Vec::with_capacity(k);
        let r0 = rng.random_range(params.radius.0..params.radius.1);
        disks.push(Disk::new(base_point(surface, &mut rng, 0.3), r0));
        while disks.len() < k {
            let j = rng.random_range(0..disks.len());
            let r = rng.random_range(params.radius.0..params.radius.1);
            let dist = (disks[j].radius + r) * rng.random_range(params.offset.0..params.offset.1);
            if surface == Surface::Spherical && dist >= PI - 0.05 {
                continue;
            }
            let c = random_step(surface, &mut rng, &disks[j].center, dist);
            disks.push(Disk::new(c, r));
        }
        let Ok(config) = BallConfiguration::new(surface, disks.clone()) else { continue };
        let Some(poly) = well_conditioned(&config) else { continue };
        let t = poly.topology();
        let ok = match want {
            Want::SimplyConnected => t.simply_connected,
            Want::Any => t.component_count == 1,
        };
        if ok {
            return Ok(scene_from(surface, &disks, seed, format!("random-{}-{k}", surface.name())));
        }
    }
    Err(GenerationError::GenerationFailure(MAX_ATTEMPTS))
}

/// A ring of 5–7 disks around an uncovered center: one hole.
pub fn random_ring(surface: Surface, seed: u64) -> Result<Scene, GenerationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let m = rng.random_range(5..=7usize);
        let big = match surface {
            Surface::Euclidean => rng.random_range(1.0..2.0),
            Surface::Spherical => rng.random_range(0.6..1.0),
            Surface::Hyperbolic => rng.random_range(0.8..1.4),
        };
        let center = base_point(surface, &mut rng, 0.2);
        let (u, v) = surface.frame(&center);
        let phase: f64 = rng.random_range(0.0..TAU);
        let centers: Vec<Point> = (0..m)
            .map(|i| {
                let th = phase + TAU * i as f64 / m as f64 + rng.random_range(-0.1..0.1);
                surface.exp(&center, &(u * th.cos() + v * th.sin()), big * rng.random_range(0.95..1.05))
            })
            .collect();
        let gap = (0..m)
            .map(|i| surface.distance(&centers[i], &centers[(i + 1) % m]))
            .fold(0.0, f64::max);
        let r = 0.5 * gap / rng.random_range(0.6..0.85);
        let disks: Vec<Disk> = centers.iter().map(|c| Disk::new(*c, r * rng.random_range(1.0..1.08))).collect();
        let Ok(config) = BallConfiguration::new(surface, disks.clone()) else { continue };
        if config.contains(&center) {
            continue;
        }
        let Some(poly) = well_conditioned(&config) else { continue };
        let t = poly.topology();
        if t.component_count == 1 && t.hole_count == 1 {
            return Ok(scene_from(surface, &disks, seed, format!("ring-{}-{m}", surface.name())));
        }
    }
    Err(GenerationError::GenerationFailure(MAX_ATTEMPTS))
}

/// `count` fold lines through random points of the given disks.
pub fn random_folds(config: &BallConfiguration, count: usize, seed: u64) -> Vec<[Point; 2]> {
    let s = config.surface();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let d = &config.disks()[rng.random_range(0..config.disks().len())];
        let dist = d.radius * rng.random_range(0.0..1.0f64).sqrt();
        let p = random_step(s, &mut rng, &d.center, dist);
        let q = random_step(s, &mut rng, &p, 1.0);
        if s.line_through(&p, &q).is_ok() {
            out.push([p, q]);
        }
    }
    out
}

/// Attaches random folds to a scene.
pub fn with_random_folds(scene: &Scene, count: usize, seed: u64) -> Scene {
    let config = scene.config().expect("generated scenes are valid");
    let s = config.surface();
    let lines = random_folds(&config, count, seed)
        .iter()
        .map(|[p, q]| [p.coords(s), q.coords(s)])
        .collect();
    let mut out = scene.clone();
    out.contraction = Some(ContractionSpec::Folds { lines });
    out
}

pub fn fold_lines(surface: Surface, pairs: &[[Point; 2]]) -> Vec<GeodesicLine> {
    pairs.iter().filter_map(|[p, q]| surface.line_through(p, q).ok()).collect()
}
