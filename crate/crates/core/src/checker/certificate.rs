//! Leaf-by-leaf peeling of a tree-shaped central set, recording at each step
//! that removing a leaf edge loses at least as much area before the
//! contraction as after it.

use serde::Serialize;

use super::{area_of, compare, mapped_sub_union, AreaValue, CheckError, CheckOptions, Verdict};
use crate::central_set::{sub_central_set_check, sub_union, CentralComplex, SubCentralReport, Subcomplex};
use crate::contraction::{coordinate_scale, refine_complex, PiecewiseIsometry};
use crate::geom::{Surface, EPS_PRED};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeelStep {
    pub edge: usize,
    pub leaf: Vec<f64>,
    pub hinge: Vec<f64>,
    pub hinge_radius_before: f64,
    pub hinge_radius_after: f64,
    /// Change of the edge length under the map.
    pub edge_distortion: f64,
    pub area_current: AreaValue,
    pub area_rest: AreaValue,
    pub area_current_mapped: AreaValue,
    pub area_rest_mapped: AreaValue,
    pub delta_before: f64,
    pub delta_after: f64,
    pub inequality: Verdict,
    pub sub_central_set: Option<SubCentralReport>,
    pub sub_central_set_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub surface: Surface,
    pub refined_vertices: usize,
    pub refined_edges: usize,
    pub steps: Vec<PeelStep>,
    pub final_vertex: Vec<f64>,
    pub final_radius: f64,
    pub area_before: AreaValue,
    pub area_after: AreaValue,
    pub verdict: Verdict,
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

pub fn peel_certificate(cc: &CentralComplex, f: &PiecewiseIsometry, opts: &CheckOptions) -> Result<Certificate, CheckError> {
    if !cc.is_tree() {
        return Err(CheckError::NotATree(cc.euler_characteristic()));
    }
    let s = cc.surface;
    let rc = refine_complex(f, cc)?;
    let r = &rc.complex;
    for (k, e) in r.edges.iter().enumerate() {
        let (a, b) = (&r.vertices[e.ends[0]].point, &r.vertices[e.ends[1]].point);
        let (fa, fb) = (f.apply(a)?, f.apply(b)?);
        if (s.distance(a, b) - s.distance(&fa, &fb)).abs() > EPS_PRED * coordinate_scale(&fa, &fb) {
            return Err(CheckError::RefinementFailure(k));
        }
    }

    let mut current = Subcomplex::whole(r);
    let mut area_current = area_of(&sub_union(r, &current)?, opts, 100)?;
    let mut area_current_mapped = area_of(&mapped_sub_union(r, &current, f)?, opts, 101)?;
    let (area_before, area_after) = (area_current, area_current_mapped);
    let mut steps = Vec::new();
    let mut verdict = Verdict::Holds;

    while !current.edges.is_empty() {
        let degree = |v: usize| current.edges.iter().filter(|&&e| r.edges[e].ends.contains(&v)).count();
        let leaf = current
            .vertices
            .iter()
            .copied()
            .filter(|&v| degree(v) == 1)
            .min_by(|&a, &b| {
                let (pa, pb) = (r.vertices[a].point.coords(s), r.vertices[b].point.coords(s));
                if lex_less(&pa, &pb) {
                    std::cmp::Ordering::Less
                } else if lex_less(&pb, &pa) {
                    std::cmp::Ordering::Greater
                } else {
                    a.cmp(&b)
                }
            })
            .expect("a finite tree with an edge has a leaf");
        let edge = current
            .edges
            .iter()
            .copied()
            .find(|&e| r.edges[e].ends.contains(&leaf))
            .expect("leaf has an edge");
        let [a, b] = r.edges[edge].ends;
        let hinge = if a == leaf { b } else { a };

        let mut rest = current.clone();
        rest.edges.remove(&edge);
        rest.vertices.remove(&leaf);

        let n = steps.len() as u64;
        let area_rest = area_of(&sub_union(r, &rest)?, opts, 1000 + 2 * n)?;
        let area_rest_mapped = area_of(&mapped_sub_union(r, &rest, f)?, opts, 1001 + 2 * n)?;
        let delta_before = area_current.value - area_rest.value;
        let delta_after = area_current_mapped.value - area_rest_mapped.value;
        let sigma = [area_current, area_rest, area_current_mapped, area_rest_mapped]
            .iter()
            .map(|v| v.std_error * v.std_error)
            .sum::<f64>()
            .sqrt();
        let inequality = compare(delta_after, delta_before, sigma, opts.tolerance);

        let (pl, ph) = (r.vertices[leaf].point, r.vertices[hinge].point);
        let (fl, fh) = (f.apply(&pl)?, f.apply(&ph)?);
        let edge_distortion = (s.distance(&pl, &ph) - s.distance(&fl, &fh)).abs();
        let hinge_radius = r.vertices[hinge].radius;

        let (sub_central_set, sub_central_set_error) = match sub_central_set_check(r, &rest) {
            Ok(rep) => (Some(rep), None),
            Err(e) => (None, Some(e.to_string())),
        };

        verdict = verdict.and(inequality);
        steps.push(PeelStep {
            edge,
            leaf: pl.coords(s),
            hinge: ph.coords(s),
            hinge_radius_before: hinge_radius,
            hinge_radius_after: hinge_radius,
            edge_distortion,
            area_current,
            area_rest,
            area_current_mapped,
            area_rest_mapped,
            delta_before,
            delta_after,
            inequality,
            sub_central_set,
            sub_central_set_error,
        });
        current = rest;
        area_current = area_rest;
        area_current_mapped = area_rest_mapped;
    }

    let last = *current.vertices.iter().next().expect("peeling stops at one vertex");
    verdict = verdict.and(compare(area_current_mapped.value, area_current.value, area_current_mapped.std_error, opts.tolerance));

    Ok(Certificate {
        surface: s,
        refined_vertices: r.vertices.len(),
        refined_edges: r.edges.len(),
        steps,
        final_vertex: r.vertices[last].point.coords(s),
        final_radius: r.vertices[last].radius,
        area_before,
        area_after,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball_union::{validate, BallConfiguration};
    use crate::central_set::central_set;
    use crate::checker::kp::{kp_verify, Contraction, KPInstance};
    use crate::geom::{Disk, Point};

    fn complex(disks: &[(f64, f64)]) -> CentralComplex {
        let cfg = BallConfiguration::new(
            Surface::Euclidean,
            disks.iter().map(|&(x, y)| Disk::new(Point::euclidean(x, y), 1.0)).collect(),
        )
        .unwrap();
        central_set(&validate(&cfg).unwrap()).unwrap()
    }

    #[test]
    fn single_vertex() {
        let cc = complex(&[(0.0, 0.0)]);
        let f = PiecewiseIsometry::fold(
            Surface::Euclidean,
            &Surface::Euclidean.line_through(&Point::euclidean(0.3, 0.0), &Point::euclidean(0.3, 1.0)).unwrap(),
        );
        let c = peel_certificate(&cc, &f, &CheckOptions::default()).unwrap();
        assert!(c.steps.is_empty());
        assert_eq!(c.verdict, Verdict::Holds);
    }

    #[test]
    fn two_disk_fold_along_axis() {
        let cc = complex(&[(0.0, 0.0), (1.0, 0.0)]);
        let s = Surface::Euclidean;
        let f = PiecewiseIsometry::fold(s, &s.line_through(&Point::euclidean(0.0, 0.0), &Point::euclidean(1.0, 0.0)).unwrap());
        let c = peel_certificate(&cc, &f, &CheckOptions::default()).unwrap();
        assert_eq!(c.steps.len(), 1);
        assert!(c.steps[0].delta_before.abs() > 0.1);
        assert!((c.steps[0].delta_after - c.steps[0].delta_before).abs() < 1e-12);
        assert_eq!(c.verdict, Verdict::Holds);
    }

    #[test]
    fn y_tree_fold() {
        let h = 3f64.sqrt() / 2.0;
        let cc = complex(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)]);
        let s = Surface::Euclidean;
        // through the hub, perpendicular to the leaf edge towards (0.5, h)
        let hub = Point::euclidean(0.5, h / 3.0);
        let f = PiecewiseIsometry::fold(s, &s.line_through(&hub, &Point::euclidean(1.5, h / 3.0)).unwrap());
        let c = peel_certificate(&cc, &f, &CheckOptions::default()).unwrap();
        assert_eq!(c.steps.len(), 3);
        assert_eq!(c.verdict, Verdict::Holds);
        for step in &c.steps {
            assert!(step.sub_central_set.as_ref().is_some_and(|r| r.matches), "{step:?}");
        }
        let kp = kp_verify(
            &KPInstance { polytope: cc.source().clone(), contraction: Contraction::Piecewise(f) },
            &CheckOptions::default(),
        )
        .unwrap();
        assert!((kp.area_after_refined.unwrap().value - c.area_after.value).abs() < 1e-6);
        assert!((kp.area_before - c.area_before.value).abs() < 1e-6);
    }

    #[test]
    fn ring_is_not_a_tree() {
        let s = 1.9;
        let cc = complex(&[(0.0, 0.0), (s, 0.0), (s / 2.0, s * 3f64.sqrt() / 2.0)]);
        let f = PiecewiseIsometry::identity(Surface::Euclidean);
        assert_eq!(peel_certificate(&cc, &f, &CheckOptions::default()), Err(CheckError::NotATree(0)));
    }
}
