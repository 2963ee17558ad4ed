//! JSON scene documents.
//!
//! ```json
//! {"version": 1, "surface": "euclidean",
//!  "disks": [{"center": [0, 0], "radius": 1}],
//!  "contraction": {"type": "folds", "lines": [[[0.75, 1], [0.75, 0]]]}}
//! ```
//!
//! Coordinates are kept exactly as written so that a document survives a
//! parse/serialize round trip unchanged.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball_union::BallConfiguration;
use crate::central_set::{CentralComplex, Subcomplex};
use crate::checker::Contraction;
use crate::contraction::{CenterMap, PiecewiseIsometry};
use crate::geom::{Disk, Point, Surface};

pub const SCENE_VERSION: u32 = 1;
const JITTER: f64 = 1e-7;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SceneError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: unknown surface {value:?}")]
    UnknownSurface { path: String, value: String },
    #[error("{path}: unsupported scene version {value}")]
    UnsupportedVersion { path: String, value: u64 },
    #[error("{path}: {message}")]
    InvalidDisk { path: String, message: String },
    #[error("{path}: {message}")]
    InvalidContraction { path: String, message: String },
    #[error("{path}: {message}")]
    InvalidSelection { path: String, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

impl SceneError {
    pub fn code(&self) -> &'static str {
        match self {
            SceneError::Syntax { .. } => "syntax_error",
            SceneError::UnknownSurface { .. } => "unknown_surface",
            SceneError::UnsupportedVersion { .. } => "unsupported_version",
            SceneError::InvalidDisk { .. } => "invalid_disk",
            SceneError::InvalidContraction { .. } => "invalid_contraction",
            SceneError::InvalidSelection { .. } => "invalid_selection",
            SceneError::Schema { .. } => "schema_error",
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            SceneError::Syntax { .. } => None,
            SceneError::UnknownSurface { path, .. }
            | SceneError::UnsupportedVersion { path, .. }
            | SceneError::InvalidDisk { path, .. }
            | SceneError::InvalidContraction { path, .. }
            | SceneError::InvalidSelection { path, .. }
            | SceneError::Schema { path, .. } => Some(path),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDisk {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// A contraction as written in a scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ContractionSpec {
    /// Fold lines through two points each; the last one acts first.
    Folds { lines: Vec<[Vec<f64>; 2]> },
    /// Source and image of each disk center.
    Pointmap { pairs: Vec<[Vec<f64>; 2]> },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selection {
    #[serde(default)]
    pub vertices: Vec<usize>,
    #[serde(default)]
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub version: u32,
    pub surface: Surface,
    pub disks: Vec<SceneDisk>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<ContractionSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub selections: BTreeMap<String, Selection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn point_at(surface: Surface, coords: &[f64], path: String, wrap: fn(String, String) -> SceneError) -> Result<Point, SceneError> {
    Point::from_coords(surface, coords).map_err(|e| wrap(path, e.to_string()))
}

fn disk_error(path: String, message: String) -> SceneError {
    SceneError::InvalidDisk { path, message }
}

fn contraction_error(path: String, message: String) -> SceneError {
    SceneError::InvalidContraction { path, message }
}

/// Parses and validates a scene document.
pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| SceneError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match value.get("version") {
        Some(v) if v.as_u64() == Some(SCENE_VERSION as u64) => {}
        Some(v) => {
            return Err(SceneError::UnsupportedVersion { path: "/version".into(), value: v.as_u64().unwrap_or(0) })
        }
        None => return Err(SceneError::Schema { path: "/version".into(), message: "missing field".into() }),
    }
    match value.get("surface").and_then(|s| s.as_str()) {
        Some("euclidean" | "spherical" | "hyperbolic") => {}
        Some(other) => return Err(SceneError::UnknownSurface { path: "/surface".into(), value: other.into() }),
        None => return Err(SceneError::Schema { path: "/surface".into(), message: "missing or not a string".into() }),
    }
    let scene: Scene =
        serde_json::from_value(value).map_err(|e| SceneError::Schema { path: "".into(), message: e.to_string() })?;
    scene.check()?;
    Ok(scene)
}

pub fn to_json(scene: &Scene) -> String {
    serde_json::to_string_pretty(scene).expect("scenes serialize")
}

impl Scene {
    pub fn from_disks(surface: Surface, disks: &[Disk], label: Option<String>, seed: Option<u64>) -> Scene {
        Scene {
            version: SCENE_VERSION,
            surface,
            disks: disks.iter().map(|d| SceneDisk { center: d.center.coords(surface), radius: d.radius }).collect(),
            contraction: None,
            selections: BTreeMap::new(),
            label,
            seed,
        }
    }

    fn check(&self) -> Result<(), SceneError> {
        if self.disks.is_empty() {
            return Err(SceneError::InvalidDisk { path: "/disks".into(), message: "no disks".into() });
        }
        self.config()?;
        self.contraction()?;
        Ok(())
    }

    pub fn config(&self) -> Result<BallConfiguration, SceneError> {
        let s = self.surface;
        let mut disks = Vec::with_capacity(self.disks.len());
        for (i, d) in self.disks.iter().enumerate() {
            let center = point_at(s, &d.center, format!("/disks/{i}/center"), disk_error)?;
            let bad_radius = !(d.radius > 0.0) || !d.radius.is_finite() || (s == Surface::Spherical && d.radius >= std::f64::consts::PI);
            if bad_radius {
                return Err(SceneError::InvalidDisk {
                    path: format!("/disks/{i}/radius"),
                    message: format!("radius {} is out of range", d.radius),
                });
            }
            disks.push(Disk::new(center, d.radius));
        }
        BallConfiguration::new(s, disks).map_err(|e| SceneError::InvalidDisk { path: "/disks".into(), message: e.to_string() })
    }

    /// Builds the contraction, if the scene has one.
    pub fn contraction(&self) -> Result<Option<Contraction>, SceneError> {
        let s = self.surface;
        match &self.contraction {
            None => Ok(None),
            Some(ContractionSpec::Folds { lines }) => {
                let mut geodesics = Vec::with_capacity(lines.len());
                for (i, [p, q]) in lines.iter().enumerate() {
                    let p = point_at(s, p, format!("/contraction/lines/{i}/0"), contraction_error)?;
                    let q = point_at(s, q, format!("/contraction/lines/{i}/1"), contraction_error)?;
                    let line = s.line_through(&p, &q).map_err(|e| SceneError::InvalidContraction {
                        path: format!("/contraction/lines/{i}"),
                        message: e.to_string(),
                    })?;
                    geodesics.push(line);
                }
                Ok(Some(Contraction::Piecewise(PiecewiseIsometry::from_folds(s, &geodesics))))
            }
            Some(ContractionSpec::Pointmap { pairs }) => {
                let mut points = Vec::with_capacity(pairs.len());
                for (i, [p, q]) in pairs.iter().enumerate() {
                    let p = point_at(s, p, format!("/contraction/pairs/{i}/0"), contraction_error)?;
                    let q = point_at(s, q, format!("/contraction/pairs/{i}/1"), contraction_error)?;
                    points.push((p, q));
                }
                let map = CenterMap::new(s, points).map_err(|e| SceneError::InvalidContraction {
                    path: "/contraction/pairs".into(),
                    message: e.to_string(),
                })?;
                Ok(Some(Contraction::Centers(map)))
            }
        }
    }

    /// A named selection as a subcomplex of `cc`.
    pub fn selection(&self, name: &str, cc: &CentralComplex) -> Result<Subcomplex, SceneError> {
        let path = format!("/selections/{name}");
        let sel = self
            .selections
            .get(name)
            .ok_or_else(|| SceneError::InvalidSelection { path: path.clone(), message: "no such selection".into() })?;
        let mut vertices = sel.vertices.clone();
        for &e in &sel.edges {
            if let Some(edge) = cc.edges.get(e) {
                vertices.extend(edge.ends);
            }
        }
        Subcomplex::new(cc, vertices, sel.edges.iter().copied())
            .map_err(|e| SceneError::InvalidSelection { path, message: e.to_string() })
    }

    /// Radii perturbed by at most 1e-7, reproducibly for a given seed.
    pub fn jittered(&self, seed: u64) -> Scene {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for d in &mut out.disks {
            d.radius += rng.random_range(-JITTER..=JITTER);
        }
        out
    }
}
