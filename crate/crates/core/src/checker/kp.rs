//! Area comparison of a disk union before and after a contraction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::mc::{mc_union_area, union_window, MonteCarloEstimate};
use super::{area_of, compare, mapped_sub_union, AreaValue, CheckError, CheckOptions, Verdict};
use crate::ball_union::{BallConfiguration, BallPolytope};
use crate::central_set::{central_set, CentralComplex, CentralSetError, Subcomplex};
use crate::contraction::{is_contractive, refine_complex, CenterMap, PiecewiseIsometry};
use crate::geom::{Disk, Point, Surface, EPS_PRED};

#[derive(Clone, Debug)]
pub enum Contraction {
    Piecewise(PiecewiseIsometry),
    /// Images of the disk centers, in disk order.
    Centers(CenterMap),
}

#[derive(Clone, Debug)]
pub struct KPInstance {
    pub polytope: BallPolytope,
    pub contraction: Contraction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub before: MonteCarloEstimate,
    pub before_agrees: bool,
    pub after: MonteCarloEstimate,
    pub after_agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KPReport {
    pub surface: Surface,
    pub area_before: f64,
    /// Area of the moved central-set vertex disks (or of the moved disks
    /// for a center map); the verdict is taken on this value.
    pub area_after: AreaValue,
    /// What `area_after` measures.
    pub after_region: &'static str,
    /// Area of the moved disks at all vertices of the refined central set.
    pub area_after_refined: Option<AreaValue>,
    /// Area of the moved original disks.
    pub area_mapped_originals: AreaValue,
    pub contractive: bool,
    pub max_distance_increase: f64,
    pub residual: f64,
    pub verdict: Verdict,
    pub oracle: Option<OracleReport>,
}

fn moved(config: &BallConfiguration, image: impl Fn(usize, &Point) -> Result<Point, CheckError>) -> Result<BallConfiguration, CheckError> {
    let disks = config
        .disks()
        .iter()
        .enumerate()
        .map(|(i, d)| Ok(Disk::new(image(i, &d.center)?, d.radius)))
        .collect::<Result<Vec<_>, CheckError>>()?;
    Ok(BallConfiguration::new(config.surface(), disks)?)
}

/// Sources and images of the centers the check depends on.
fn center_pairs(points: &[Point], f: &PiecewiseIsometry) -> Result<CenterMap, CheckError> {
    let s = f.surface();
    let mut pairs: Vec<(Point, Point)> = Vec::new();
    for p in points {
        if pairs.iter().all(|(q, _)| s.distance(p, q) > EPS_PRED) {
            pairs.push((*p, f.apply(p)?));
        }
    }
    Ok(CenterMap::new(s, pairs)?)
}

fn complex_of(poly: &BallPolytope) -> Result<Option<CentralComplex>, CheckError> {
    match central_set(poly) {
        Ok(cc) => Ok(Some(cc)),
        Err(CentralSetError::DisconnectedUnion(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn kp_verify(inst: &KPInstance, opts: &CheckOptions) -> Result<KPReport, CheckError> {
    let poly = &inst.polytope;
    let config = poly.config();
    let surface = poly.surface();
    let before = poly.union_area();
    let tol = opts.tolerance;

    let (after_config, after_region, refined, originals, contractivity) = match &inst.contraction {
        Contraction::Piecewise(f) => {
            let check = f.validate();
            if !check.valid {
                return Err(CheckError::ValidationFailure(format!("{:?}", check.defects)));
            }
            let originals = moved(config, |_, p| Ok(f.apply(p)?))?;
            match complex_of(poly)? {
                Some(cc) => {
                    let mut points: Vec<Point> = cc.vertices.iter().map(|v| v.point).collect();
                    points.extend(config.disks().iter().map(|d| d.center));
                    let contractivity = is_contractive(&center_pairs(&points, f)?);
                    let vertex_images = mapped_sub_union(&cc, &Subcomplex::whole(&cc), f)?;
                    let rc = refine_complex(f, &cc)?;
                    let refined = mapped_sub_union(&rc.complex, &Subcomplex::whole(&rc.complex), f)?;
                    (vertex_images, "central_set_vertex_disks", Some(refined), originals, contractivity)
                }
                None => {
                    let points: Vec<Point> = config.disks().iter().map(|d| d.center).collect();
                    let contractivity = is_contractive(&center_pairs(&points, f)?);
                    (originals.clone(), "mapped_disks", None, originals, contractivity)
                }
            }
        }
        Contraction::Centers(m) => {
            let s = m.surface();
            let image = |i: usize, p: &Point| {
                m.pairs()
                    .iter()
                    .find(|(q, _)| s.distance(p, q) <= EPS_PRED)
                    .map(|(_, img)| *img)
                    .ok_or_else(|| CheckError::ValidationFailure(format!("center map has no image for disk {i}")))
            };
            let originals = moved(config, image)?;
            (originals.clone(), "mapped_disks", None, originals, is_contractive(m))
        }
    };
    if !contractivity.contractive {
        let (i, j) = contractivity.witness.unwrap_or((0, 0));
        return Err(CheckError::NotAContraction(i, j, contractivity.max_increase));
    }

    let area_after = area_of(&after_config, opts, 1)?;
    let area_after_refined = refined.as_ref().map(|c| area_of(c, opts, 2)).transpose()?;
    let area_mapped_originals = area_of(&originals, opts, 3)?;

    let mut verdict = compare(area_after.value, before, area_after.std_error, tol);
    if let Some(r) = &area_after_refined {
        verdict = verdict.and(compare(r.value, before, r.std_error, tol));
    }
    verdict = verdict.and(compare(area_mapped_originals.value, before, area_mapped_originals.std_error, tol));

    let oracle = if opts.oracle {
        let b = mc_union_area(config, opts.samples, opts.seed)?;
        let a = mc_union_area(&after_config, opts.samples, opts.seed.wrapping_add(17))?;
        Some(OracleReport {
            before_agrees: b.agrees_with(before, 4.0),
            before: b,
            after_agrees: a.agrees_with(area_after.value, 4.0 + if area_after.exact { 0.0 } else { 4.0 }),
            after: a,
        })
    } else {
        None
    };

    Ok(KPReport {
        surface,
        area_before: before,
        area_after,
        after_region,
        area_after_refined,
        area_mapped_originals,
        contractive: true,
        max_distance_increase: contractivity.max_increase,
        residual: area_after.value - before,
        verdict,
        oracle,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionReport {
    pub holds: bool,
    pub tested: u64,
    pub witness: Option<Vec<f64>>,
}

/// Samples points of the moved original disks and checks that they lie in
/// the moved central-set disks (including the swept edge disks).
pub fn inclusion_check(inst: &KPInstance, n: u64, seed: u64) -> Result<InclusionReport, CheckError> {
    let Contraction::Piecewise(f) = &inst.contraction else {
        return Err(CheckError::NeedsPiecewise);
    };
    let poly = &inst.polytope;
    let surface = poly.surface();
    let v = moved(poly.config(), |_, p| Ok(f.apply(p)?))?;
    let cc = central_set(poly)?;
    let rc = refine_complex(f, &cc)?;
    let uf = mapped_sub_union(&rc.complex, &Subcomplex::whole(&rc.complex), f)?;
    let window = union_window(&[&v]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tested = 0;
    for _ in 0..n {
        let p = window.sample(&mut rng);
        if !v.contains_strict(&p) {
            continue;
        }
        tested += 1;
        if !uf.contains(&p) {
            return Ok(InclusionReport { holds: false, tested, witness: Some(p.coords(surface)) });
        }
    }
    Ok(InclusionReport { holds: true, tested, witness: None })
}
