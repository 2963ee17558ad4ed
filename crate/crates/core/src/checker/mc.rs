//! Seeded Monte Carlo area estimates.
//!
//! Samples are split into a fixed number of chunks, each drawing from its
//! own ChaCha stream, so the estimate does not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ball_union::BallConfiguration;
use crate::geom::{Isometry, Point, Surface};

const CHUNKS: u64 = 64;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum McError {
    #[error("sampling window does not contain the region")]
    WindowTooSmall,
    #[error("window does not belong to the {0:?} surface")]
    WrongSurface(Surface),
}

/// Region that samples are drawn from.
#[derive(Clone, Debug, PartialEq)]
pub enum Window {
    Rect { min: [f64; 2], max: [f64; 2] },
    Sphere,
    HyperbolicDisk { center: Point, radius: f64 },
}

impl Window {
    pub fn surface(&self) -> Surface {
        match self {
            Window::Rect { .. } => Surface::Euclidean,
            Window::Sphere => Surface::Spherical,
            Window::HyperbolicDisk { .. } => Surface::Hyperbolic,
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Window::Rect { min, max } => (max[0] - min[0]) * (max[1] - min[1]),
            Window::Sphere => 4.0 * std::f64::consts::PI,
            Window::HyperbolicDisk { radius, .. } => std::f64::consts::TAU * (radius.cosh() - 1.0),
        }
    }

    pub(crate) fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        match self {
            Window::Rect { min, max } => {
                Point::euclidean(rng.random_range(min[0]..max[0]), rng.random_range(min[1]..max[1]))
            }
            Window::Sphere => loop {
                let (x, y, z): (f64, f64, f64) =
                    (rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
                if let Ok(p) = Point::spherical(x, y, z) {
                    break p;
                }
            },
            Window::HyperbolicDisk { center, radius } => {
                let u: f64 = rng.random();
                let rho = (1.0 + u * (radius.cosh() - 1.0)).acosh();
                let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let p = Point::hyperbolic_xy(rho.sinh() * th.cos(), rho.sinh() * th.sin());
                Isometry::translation_to(Surface::Hyperbolic, center).apply(&p)
            }
        }
    }

    /// Points on the window boundary, used to detect regions that spill over.
    fn rim(&self) -> Vec<Point> {
        match self {
            Window::Rect { min, max } => (0..64)
                .flat_map(|k| {
                    let s = k as f64 / 64.0;
                    let x = min[0] + s * (max[0] - min[0]);
                    let y = min[1] + s * (max[1] - min[1]);
                    [
                        Point::euclidean(x, min[1]),
                        Point::euclidean(x, max[1]),
                        Point::euclidean(min[0], y),
                        Point::euclidean(max[0], y),
                    ]
                })
                .collect(),
            Window::Sphere => vec![],
            Window::HyperbolicDisk { center, radius } => {
                let t = Isometry::translation_to(Surface::Hyperbolic, center);
                (0..256)
                    .map(|k| {
                        let th = k as f64 / 256.0 * std::f64::consts::TAU;
                        t.apply(&Point::hyperbolic_xy(radius.sinh() * th.cos(), radius.sinh() * th.sin()))
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error + 1e-12
    }
}

/// Estimates the area of `{p in window : member(p)}`.
pub fn mc_area<F>(surface: Surface, member: F, window: &Window, n: u64, seed: u64) -> Result<MonteCarloEstimate, McError>
where
    F: Fn(&Point) -> bool + Sync,
{
    if window.surface() != surface {
        return Err(McError::WrongSurface(surface));
    }
    if window.rim().iter().any(&member) {
        return Err(McError::WindowTooSmall);
    }
    let hits: u64 = (0..CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let count = n / CHUNKS + u64::from(chunk < n % CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            (0..count).filter(|_| member(&window.sample(&mut rng))).count() as u64
        })
        .sum();
    let area = window.measure();
    if n == 0 {
        return Ok(MonteCarloEstimate { mean: 0.0, std_error: 0.0, samples: 0, seed });
    }
    let p = hits as f64 / n as f64;
    Ok(MonteCarloEstimate {
        mean: p * area,
        std_error: (p * (1.0 - p) / n as f64).sqrt() * area,
        samples: n,
        seed,
    })
}

/// A window containing every disk of the given configurations, with a margin.
pub fn union_window(configs: &[&BallConfiguration]) -> Window {
    let surface = configs[0].surface();
    let disks = configs.iter().flat_map(|c| c.disks().iter());
    match surface {
        Surface::Euclidean => {
            let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for d in disks {
                let (x, y, r) = (d.center.x(), d.center.y(), d.radius);
                min = [min[0].min(x - r), min[1].min(y - r)];
                max = [max[0].max(x + r), max[1].max(y + r)];
            }
            let pad = 1e-3 * (max[0] - min[0]).max(max[1] - min[1]);
            Window::Rect { min: [min[0] - pad, min[1] - pad], max: [max[0] + pad, max[1] + pad] }
        }
        Surface::Spherical => Window::Sphere,
        Surface::Hyperbolic => {
            let center = configs[0].disks()[0].center;
            let radius = disks
                .map(|d| Surface::Hyperbolic.distance(&center, &d.center) + d.radius)
                .fold(0.0, f64::max);
            Window::HyperbolicDisk { center, radius: radius + 1e-3 }
        }
    }
}

/// Monte Carlo area of a disk union.
pub fn mc_union_area(config: &BallConfiguration, n: u64, seed: u64) -> Result<MonteCarloEstimate, McError> {
    mc_area(config.surface(), |p| config.contains_strict(p), &union_window(&[config]), n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Disk;
    use std::f64::consts::PI;

    #[test]
    fn unit_disk_and_hemisphere() {
        let w = Window::Rect { min: [-1.5, -1.5], max: [1.5, 1.5] };
        let est = mc_area(Surface::Euclidean, |p| p.x().hypot(p.y()) <= 1.0, &w, 1_000_000, 3).unwrap();
        assert!(est.agrees_with(PI, 4.0), "{est:?}");
        let empty = mc_area(Surface::Euclidean, |_| false, &w, 1000, 3).unwrap();
        assert_eq!((empty.mean, empty.std_error), (0.0, 0.0));
        let hemi = mc_area(Surface::Spherical, |p| p.z() >= 0.0, &Window::Sphere, 1_000_000, 5).unwrap();
        assert!(hemi.agrees_with(2.0 * PI, 4.0), "{hemi:?}");
    }

    #[test]
    fn estimates_are_reproducible() {
        let w = Window::Rect { min: [-1.0, -1.0], max: [1.0, 1.0] };
        let f = |p: &Point| p.x() * p.x() + 2.0 * p.y() * p.y() < 0.5;
        let a = mc_area(Surface::Euclidean, f, &w, 100_000, 9).unwrap();
        let b = mc_area(Surface::Euclidean, f, &w, 100_000, 9).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let c = mc_area(Surface::Euclidean, f, &w, 100_000, 10).unwrap();
        assert_ne!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn small_window_is_detected() {
        let w = Window::Rect { min: [-0.5, -0.5], max: [0.5, 0.5] };
        let res = mc_area(Surface::Euclidean, |p| p.x().hypot(p.y()) <= 1.0, &w, 1000, 1);
        assert_eq!(res, Err(McError::WindowTooSmall));
    }

    #[test]
    fn disk_areas_match_closed_forms() {
        for (k, surface) in [Surface::Euclidean, Surface::Spherical, Surface::Hyperbolic].into_iter().enumerate() {
            for j in 0..20 {
                let r = 0.1 + 0.12 * j as f64;
                let center = match surface {
                    Surface::Euclidean => Point::euclidean(0.3, -0.2),
                    Surface::Spherical => Point::spherical(0.0, 0.6, 0.8).unwrap(),
                    Surface::Hyperbolic => Point::hyperbolic_xy(0.4, 0.1),
                };
                let cfg = BallConfiguration::new(surface, vec![Disk::new(center, r)]).unwrap();
                let est = mc_union_area(&cfg, 200_000, (k * 100 + j) as u64).unwrap();
                assert!(est.agrees_with(surface.disk_area(r).unwrap(), 4.0), "{surface:?} r={r} {est:?}");
            }
        }
    }
}
