//! Command-line front end: scene loading, command dispatch and JSON reports.
//!
//! Every command prints a JSON report. Failures print
//! `{"error": {"code": ..., "message": ..., "path": ...}}` and exit with 1;
//! verdicts exit with 0 (holds), 2 (violated) or 3 (inconclusive).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::ball_union::{validate, BallPolytope, TopologyReport, UnionError};
use crate::central_set::{central_set, relative_central_set, CentralComplex, CentralSetError, EdgePiece, Subcomplex, VertexKind};
use crate::checker::{
    kp_verify, mc_union_area, peel_certificate, split_check, CheckError, CheckOptions, Contraction, KPInstance,
    MonteCarloEstimate, Verdict,
};
use crate::contraction::{is_contractive, CenterMap, ContractionError, Defect};
use crate::geom::{Point, Surface, EPS_AREA, EPS_PRED};
use crate::random::{random_ring, random_scene, with_random_folds, GenerationError, Want};
use crate::scene::{parse_scene, to_json, Scene, SceneError};
use crate::svg::{svg_document, SvgError};

#[derive(Clone, Debug, Parser)]
#[command(name = "kpcentral", version, about = "Central sets of disk unions and Kneser-Poulsen checks")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    /// Scene document (JSON).
    #[arg(long, global = true)]
    pub scene: Option<PathBuf>,
    /// Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Area tolerance of the verdicts.
    #[arg(long, global = true, default_value_t = EPS_AREA)]
    pub tolerance: f64,
    /// Also write the output to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cross-check exact areas by sampling.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Perturb radii by at most 1e-7, seeded by --seed.
    #[arg(long, global = true)]
    pub jitter: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SurfaceArg {
    Euclidean,
    Spherical,
    Hyperbolic,
}

impl From<SurfaceArg> for Surface {
    fn from(s: SurfaceArg) -> Surface {
        match s {
            SurfaceArg::Euclidean => Surface::Euclidean,
            SurfaceArg::Spherical => Surface::Spherical,
            SurfaceArg::Hyperbolic => Surface::Hyperbolic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WantArg {
    SimplyConnected,
    Any,
    Ring,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Area of the union.
    Area,
    /// Central set of the union.
    CentralSet,
    /// Components, holes and boundary arrangement.
    Topology,
    /// Relative central set of a point.
    Relative {
        /// Point coordinates, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<f64>,
    },
    /// Validity and contractivity of the scene's contraction.
    CheckContraction,
    /// Compares the union area before and after the contraction.
    VerifyKp,
    /// Area identities for a split of the central set.
    SplitCheck {
        /// Selection name of the first piece (default: first half of the edges).
        #[arg(long)]
        x: Option<String>,
        /// Selection name of the second piece (default: closure of the rest).
        #[arg(long)]
        y: Option<String>,
    },
    /// Leaf-by-leaf peeling certificate.
    Certificate,
    /// Generates a random scene.
    Random {
        #[arg(long, value_enum, default_value = "euclidean")]
        surface: SurfaceArg,
        #[arg(long, default_value_t = 4)]
        disks: usize,
        #[arg(long, value_enum, default_value = "simply-connected")]
        want: WantArg,
        /// Number of random folds to attach.
        #[arg(long, default_value_t = 0)]
        folds: usize,
    },
    /// SVG figure of the scene.
    Render {
        /// Leave out the central set.
        #[arg(long)]
        no_complex: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("this command needs --scene")]
    MissingScene,
    #[error("the scene has no contraction")]
    MissingContraction,
    #[error("{0}")]
    BadArgument(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Union(#[from] UnionError),
    #[error(transparent)]
    CentralSet(#[from] CentralSetError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error(transparent)]
    Svg(#[from] SvgError),
}

fn snake(name: &str) -> String {
    let mut out = String::new();
    for (i, c) in name.chars().enumerate() {
        if c.is_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// Snake-case name of the innermost error variant, skipping wrappers.
fn variant_code(debug: &str) -> String {
    const WRAPPERS: [&str; 5] = ["Union", "CentralSet", "Contraction", "MonteCarlo", "Geom"];
    let mut rest = debug;
    loop {
        let end = rest.find(|c: char| !c.is_alphanumeric()).unwrap_or(rest.len());
        let name = &rest[..end];
        if WRAPPERS.contains(&name) && rest[end..].starts_with('(') {
            rest = &rest[end + 1..];
        } else {
            return snake(name);
        }
    }
}

impl CliError {
    pub fn code(&self) -> String {
        match self {
            CliError::Io { .. } => "io_error".into(),
            CliError::MissingScene => "missing_scene".into(),
            CliError::MissingContraction => "missing_contraction".into(),
            CliError::BadArgument(_) => "bad_argument".into(),
            CliError::Scene(e) => e.code().into(),
            CliError::Svg(_) => "io_error".into(),
            CliError::Union(e) => variant_code(&format!("{e:?}")),
            CliError::CentralSet(e) => variant_code(&format!("{e:?}")),
            CliError::Contraction(e) => variant_code(&format!("{e:?}")),
            CliError::Check(e) => variant_code(&format!("{e:?}")),
            CliError::Generation(e) => variant_code(&format!("{e:?}")),
        }
    }

    fn path(&self) -> Option<String> {
        match self {
            CliError::Scene(e) => e.path().map(str::to_string),
            CliError::Io { path, .. } => Some(path.clone()),
            _ => None,
        }
    }
}

/// What the binary prints and returns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: Option<String>,
    pub exit_code: u8,
}

#[derive(Serialize)]
struct ErrorBody {
    code: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
}

#[derive(Serialize)]
struct ErrorReport {
    error: ErrorBody,
}

pub fn run(args: &Args) -> Outcome {
    match dispatch(args) {
        Ok((text, exit_code)) => {
            if let Some(path) = &args.out {
                if let Err(e) = std::fs::write(path, &text) {
                    return failure(CliError::Io { path: path.display().to_string(), message: e.to_string() });
                }
            }
            Outcome { stdout: text, stderr: None, exit_code }
        }
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> Outcome {
    let report = ErrorReport { error: ErrorBody { code: e.code(), message: e.to_string(), path: e.path() } };
    Outcome { stdout: json(&report), stderr: Some(format!("error: {e}")), exit_code: 1 }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn options(args: &Args) -> CheckOptions {
    CheckOptions { tolerance: args.tolerance, samples: args.samples, seed: args.seed, oracle: args.oracle }
}

pub fn load_scene(path: &Path) -> Result<Scene, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    Ok(parse_scene(&text)?)
}

fn scene(args: &Args) -> Result<Scene, CliError> {
    let scene = load_scene(args.scene.as_deref().ok_or(CliError::MissingScene)?)?;
    Ok(if args.jitter { scene.jittered(args.seed) } else { scene })
}

fn polytope(scene: &Scene) -> Result<BallPolytope, CliError> {
    Ok(validate(&scene.config()?)?)
}

fn contraction(scene: &Scene) -> Result<Contraction, CliError> {
    scene.contraction()?.ok_or(CliError::MissingContraction)
}

#[derive(Serialize)]
struct OracleCheck {
    estimate: MonteCarloEstimate,
    agrees: bool,
}

#[derive(Serialize)]
struct AreaReport {
    surface: Surface,
    area: f64,
    topology: TopologyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleCheck>,
}

#[derive(Serialize)]
struct TopologyOut {
    surface: Surface,
    #[serde(flatten)]
    topology: TopologyReport,
    active_disks: Vec<usize>,
    corner_count: usize,
    arc_count: usize,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct VertexOut {
    point: Vec<f64>,
    radius: f64,
    kind: VertexKind,
    degree: usize,
}

#[derive(Serialize)]
struct EdgeOut {
    ends: [usize; 2],
    length: f64,
}

#[derive(Serialize)]
struct CentralSetOut {
    surface: Surface,
    vertex_count: usize,
    edge_count: usize,
    euler_characteristic: i64,
    union_euler_characteristic: i64,
    is_tree: bool,
    vertices: Vec<VertexOut>,
    edges: Vec<EdgeOut>,
}

#[derive(Serialize)]
struct RelativeOut {
    point: Vec<f64>,
    vertices: Vec<usize>,
    pieces: Vec<EdgePiece>,
    empty: bool,
    connected: bool,
}

#[derive(Serialize)]
struct ContractionOut {
    kind: &'static str,
    valid: bool,
    defect_count: usize,
    first_defect: Option<String>,
    contractive: bool,
    max_distance_increase: f64,
    witness: Option<(usize, usize)>,
}

#[derive(Serialize)]
struct SplitOut<'a> {
    x_vertices: Vec<usize>,
    x_edges: Vec<usize>,
    y_vertices: Vec<usize>,
    y_edges: Vec<usize>,
    #[serde(flatten)]
    report: &'a crate::checker::SplitReport,
}

fn central_set_out(cc: &CentralComplex) -> CentralSetOut {
    let s = cc.surface;
    CentralSetOut {
        surface: s,
        vertex_count: cc.vertices.len(),
        edge_count: cc.edges.len(),
        euler_characteristic: cc.euler_characteristic(),
        union_euler_characteristic: cc.source().topology().euler_characteristic,
        is_tree: cc.is_tree(),
        vertices: cc
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| VertexOut { point: v.point.coords(s), radius: v.radius, kind: v.kind, degree: cc.degree(i) })
            .collect(),
        edges: (0..cc.edges.len()).map(|e| EdgeOut { ends: cc.edges[e].ends, length: cc.edge_length(e) }).collect(),
    }
}

/// Default split: the closure of the first half of the edges, and the closure
/// of the remaining ones.
fn default_split(cc: &CentralComplex) -> Result<(Subcomplex, Subcomplex), CliError> {
    if cc.edges.len() < 2 {
        let whole = Subcomplex::whole(cc);
        return Ok((whole.clone(), whole));
    }
    let half = cc.edges.len() / 2;
    let x = Subcomplex::from_edges(cc, 0..half)?;
    let y = Subcomplex::from_edges(cc, half..cc.edges.len())?;
    Ok((x, y))
}

fn check_contraction(scene: &Scene, f: &Contraction) -> Result<ContractionOut, CliError> {
    match f {
        Contraction::Centers(m) => {
            let c = is_contractive(m);
            Ok(ContractionOut {
                kind: "pointmap",
                valid: true,
                defect_count: 0,
                first_defect: None,
                contractive: c.contractive,
                max_distance_increase: c.max_increase,
                witness: c.witness,
            })
        }
        Contraction::Piecewise(f) => {
            let check = f.validate();
            let s = f.surface();
            let poly = polytope(scene)?;
            let mut points: Vec<Point> = poly.config().disks().iter().map(|d| d.center).collect();
            if let Ok(cc) = central_set(&poly) {
                points.extend(cc.vertices.iter().map(|v| v.point));
            }
            let mut pairs: Vec<(Point, Point)> = Vec::new();
            for p in points {
                if pairs.iter().all(|(q, _)| s.distance(&p, q) > EPS_PRED) {
                    pairs.push((p, f.apply(&p)?));
                }
            }
            let c = is_contractive(&CenterMap::new(s, pairs)?);
            Ok(ContractionOut {
                kind: "folds",
                valid: check.valid,
                defect_count: check.defects.len(),
                first_defect: check.defects.first().map(|d: &Defect| format!("{d:?}")),
                contractive: c.contractive,
                max_distance_increase: c.max_increase,
                witness: c.witness,
            })
        }
    }
}

fn dispatch(args: &Args) -> Result<(String, u8), CliError> {
    let opts = options(args);
    match &args.command {
        Command::Area => {
            let poly = polytope(&scene(args)?)?;
            let area = poly.union_area();
            let oracle = if args.oracle {
                let estimate = mc_union_area(poly.config(), args.samples, args.seed).map_err(CheckError::from)?;
                Some(OracleCheck { agrees: estimate.agrees_with(area, 4.0), estimate })
            } else {
                None
            };
            Ok((json(&AreaReport { surface: poly.surface(), area, topology: poly.topology(), oracle }), 0))
        }
        Command::Topology => {
            let poly = polytope(&scene(args)?)?;
            let out = TopologyOut {
                surface: poly.surface(),
                topology: poly.topology(),
                active_disks: poly.active_disks().to_vec(),
                corner_count: poly.corners().len(),
                arc_count: poly.arcs().len(),
                warnings: poly.warnings().iter().map(|w| format!("{w:?}")).collect(),
            };
            Ok((json(&out), 0))
        }
        Command::CentralSet => {
            let cc = central_set(&polytope(&scene(args)?)?)?;
            Ok((json(&central_set_out(&cc)), 0))
        }
        Command::Relative { point } => {
            let sc = scene(args)?;
            let p = Point::from_coords(sc.surface, point).map_err(|e| CliError::BadArgument(format!("--point: {e}")))?;
            let cc = central_set(&polytope(&sc)?)?;
            let rel = relative_central_set(&cc, &p)?;
            let out = RelativeOut {
                point: p.coords(sc.surface),
                empty: rel.is_empty(),
                connected: rel.is_connected(&cc),
                vertices: rel.vertices,
                pieces: rel.pieces,
            };
            Ok((json(&out), 0))
        }
        Command::CheckContraction => {
            let sc = scene(args)?;
            let out = check_contraction(&sc, &contraction(&sc)?)?;
            let code = if out.valid && out.contractive { 0 } else { Verdict::Violated.exit_code() };
            Ok((json(&out), code))
        }
        Command::VerifyKp => {
            let sc = scene(args)?;
            let inst = KPInstance { polytope: polytope(&sc)?, contraction: contraction(&sc)? };
            let report = kp_verify(&inst, &opts)?;
            Ok((json(&report), report.verdict.exit_code()))
        }
        Command::SplitCheck { x, y } => {
            let sc = scene(args)?;
            let cc = central_set(&polytope(&sc)?)?;
            let (mut sx, mut sy) = default_split(&cc)?;
            if let Some(name) = x {
                sx = sc.selection(name, &cc)?;
            }
            if let Some(name) = y {
                sy = sc.selection(name, &cc)?;
            } else if x.is_some() {
                sy = sx.complement_closure(&cc);
            }
            let f = match sc.contraction()? {
                None => None,
                Some(Contraction::Piecewise(f)) => Some(f),
                Some(Contraction::Centers(_)) => return Err(CheckError::NeedsPiecewise.into()),
            };
            let report = split_check(&cc, &sx, &sy, f.as_ref(), &opts)?;
            let out = SplitOut {
                x_vertices: sx.vertices.iter().copied().collect(),
                x_edges: sx.edges.iter().copied().collect(),
                y_vertices: sy.vertices.iter().copied().collect(),
                y_edges: sy.edges.iter().copied().collect(),
                report: &report,
            };
            Ok((json(&out), 0))
        }
        Command::Certificate => {
            let sc = scene(args)?;
            let cc = central_set(&polytope(&sc)?)?;
            let Contraction::Piecewise(f) = contraction(&sc)? else {
                return Err(CheckError::NeedsPiecewise.into());
            };
            let cert = peel_certificate(&cc, &f, &opts)?;
            Ok((json(&cert), cert.verdict.exit_code()))
        }
        Command::Random { surface, disks, want, folds } => {
            let s = Surface::from(*surface);
            let scene = match want {
                WantArg::Ring => random_ring(s, args.seed)?,
                WantArg::SimplyConnected => random_scene(s, *disks, args.seed, Want::SimplyConnected)?,
                WantArg::Any => random_scene(s, *disks, args.seed, Want::Any)?,
            };
            let scene = if *folds > 0 { with_random_folds(&scene, *folds, args.seed) } else { scene };
            Ok((to_json(&scene), 0))
        }
        Command::Render { no_complex } => {
            let sc = scene(args)?;
            let config = sc.config()?;
            let cc = if *no_complex { None } else { Some(central_set(&validate(&config)?)?) };
            Ok((svg_document(&config, cc.as_ref()), 0))
        }
    }
}
