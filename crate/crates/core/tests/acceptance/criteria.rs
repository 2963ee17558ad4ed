use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::OnceLock;
use std::time::Instant;

use kpcentral::ball_union::{intersection_area_sphere, validate};
use kpcentral::central_set::{central_set, relative_central_set, sub_union};
use kpcentral::checker::{
    area_of, compare, kp_verify, mc_area, mc_union_area, peel_certificate, split_check, union_window, CheckOptions,
    Contraction, KPInstance, Verdict,
};
use kpcentral::cli::{run, Args};
use kpcentral::random::{fold_lines, random_folds, random_ring, random_scene, random_scene_with, with_random_folds, SceneParams, Want};
use kpcentral::scene::{to_json, Scene};
use kpcentral::{BallConfiguration, CentralComplex, Disk, Point, PiecewiseIsometry, Subcomplex, Surface};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid;
use crate::Outcome;

const SURFACES: [Surface; 3] = [Surface::Euclidean, Surface::Spherical, Surface::Hyperbolic];

// pinned tolerances and sizes
const AREA_TOL: f64 = 1e-6;
const GRID_STEP: f64 = 0.01;
const HAUSDORFF_LIMIT: f64 = 0.02;
const SIGMAS: f64 = 4.0;
const RECONSTRUCTION_SAMPLES: u64 = 1_000_000;
const SPLIT_SAMPLES: u64 = 200_000;
const SWEEP_SAMPLES: u64 = 200_000;
const SWEEP_PER_SURFACE: u64 = 200;
const MAX_INCONCLUSIVE_RATE: f64 = 0.05;
const RELATIVE_PER_SURFACE: usize = 1000;

fn scene_set(surface: Surface, count: u64, salt: u64) -> Vec<Scene> {
    (0..count)
        .map(|i| random_scene(surface, 2 + (i % 5) as usize, salt + i, Want::Any).expect("generator succeeds"))
        .collect()
}

fn euclidean_scenes() -> &'static [Scene] {
    static SCENES: OnceLock<Vec<Scene>> = OnceLock::new();
    SCENES.get_or_init(|| scene_set(Surface::Euclidean, 50, 1000))
}

fn curved_scenes() -> &'static [Scene] {
    static SCENES: OnceLock<Vec<Scene>> = OnceLock::new();
    SCENES.get_or_init(|| {
        let mut v = scene_set(Surface::Spherical, 20, 2000);
        v.extend(scene_set(Surface::Hyperbolic, 20, 3000));
        v
    })
}

fn complex(scene: &Scene) -> Result<CentralComplex, String> {
    let poly = validate(&scene.config().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    central_set(&poly).map_err(|e| e.to_string())
}

pub fn two_disk_fold() -> Outcome {
    let start = Instant::now();
    let s = Surface::Euclidean;
    let config =
        BallConfiguration::new(s, vec![Disk::new(Point::euclidean(0.0, 0.0), 1.0), Disk::new(Point::euclidean(1.0, 0.0), 1.0)])
            .unwrap();
    let line = s.line_through(&Point::euclidean(0.75, 1.0), &Point::euclidean(0.75, 0.0)).unwrap();
    let inst = KPInstance {
        polytope: validate(&config).unwrap(),
        contraction: Contraction::Piecewise(PiecewiseIsometry::fold(s, &line)),
    };
    let r = kp_verify(&inst, &CheckOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = (r.area_before - 5.054815).abs() <= AREA_TOL
        && (r.area_after.value - 4.131076).abs() <= AREA_TOL
        && r.verdict == Verdict::Holds
        && secs < 1.0;
    Outcome {
        pass,
        detail: format!(
            "before {:.7}, after {:.7}, verdict {:?}, {:.3}s; want 5.054815 and 4.131076 within {AREA_TOL:e}, under 1s",
            r.area_before, r.area_after.value, r.verdict, secs
        ),
    }
}

pub fn grid_oracle() -> Outcome {
    let mut worst: (f64, f64) = (0.0, 0.0);
    let mut bad = Vec::new();
    for (i, scene) in euclidean_scenes().iter().enumerate() {
        let cc = match complex(scene) {
            Ok(cc) => cc,
            Err(e) => {
                bad.push(format!("scene {i}: {e}"));
                continue;
            }
        };
        let points = grid::maximal_centers(&scene.config().unwrap(), GRID_STEP);
        let (fwd, back) = grid::hausdorff(&cc, &points);
        worst = (worst.0.max(fwd), worst.1.max(back));
        if fwd.max(back) > HAUSDORFF_LIMIT {
            bad.push(format!("scene {i}: {fwd:.4}/{back:.4}"));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} scenes, h={GRID_STEP}, worst Hausdorff {:.4} (complex to grid) and {:.4} (grid to complex), limit {HAUSDORFF_LIMIT}; failures: {}",
            euclidean_scenes().len(),
            worst.0,
            worst.1,
            if bad.is_empty() { "none".into() } else { bad.join(", ") }
        ),
    }
}

pub fn reconstruction() -> Outcome {
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    let scenes: Vec<&Scene> = euclidean_scenes().iter().chain(curved_scenes()).collect();
    for (i, scene) in scenes.iter().enumerate() {
        let config = scene.config().unwrap();
        let rec = match complex(scene) {
            Ok(cc) => cc.reconstruct(),
            Err(e) => {
                bad.push(format!("scene {i}: {e}"));
                continue;
            }
        };
        let window = union_window(&[&config, &rec]);
        let est = mc_area(config.surface(), |p| config.contains(p) != rec.contains(p), &window, RECONSTRUCTION_SAMPLES, i as u64)
            .unwrap();
        worst = worst.max(est.mean);
        if !est.agrees_with(0.0, SIGMAS) {
            bad.push(format!("scene {i} ({}): {:.2e} ± {:.1e}", scene.surface.name(), est.mean, est.std_error));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} scenes (50 euclidean, 20 spherical, 20 hyperbolic), n={RECONSTRUCTION_SAMPLES}, largest symmetric difference {worst:.2e}; failures: {}",
            scenes.len(),
            if bad.is_empty() { "none".into() } else { bad.join(", ") }
        ),
    }
}

pub fn euler() -> Outcome {
    let mut scenes: Vec<Scene> = euclidean_scenes().iter().chain(curved_scenes()).cloned().collect();
    let mut rings = 0;
    for s in SURFACES {
        for seed in 0..4 {
            scenes.push(random_ring(s, 4000 + seed).expect("ring generator succeeds"));
            rings += 1;
        }
        for seed in 0..10 {
            scenes.push(random_scene(s, 3 + (seed % 4) as usize, 5000 + seed, Want::SimplyConnected).unwrap());
        }
    }
    let mut bad = Vec::new();
    let mut one_hole = 0;
    let mut trees = 0;
    for (i, scene) in scenes.iter().enumerate() {
        let cc = match complex(scene) {
            Ok(cc) => cc,
            Err(e) => {
                bad.push(format!("scene {i}: {e}"));
                continue;
            }
        };
        let t = cc.source().topology();
        if t.hole_count == 1 {
            one_hole += 1;
        }
        let tree_ok = !t.simply_connected || cc.is_tree();
        trees += usize::from(t.simply_connected && cc.is_tree());
        if cc.euler_characteristic() != t.euler_characteristic || !tree_ok {
            bad.push(format!("scene {i}: V-E={} chi={}", cc.euler_characteristic(), t.euler_characteristic));
        }
    }
    Outcome {
        pass: bad.is_empty() && one_hole >= 10,
        detail: format!(
            "{} scenes ({rings} rings generated, {one_hole} with one hole, {trees} simply connected all trees); failures: {}",
            scenes.len(),
            if bad.is_empty() { "none".into() } else { bad.join(", ") }
        ),
    }
}

/// Edges of the branch of a tree that leaves `v` through edge `e`.
fn branch(cc: &CentralComplex, v: usize, e: usize) -> Vec<usize> {
    let mut edges = vec![e];
    let [a, b] = cc.edges[e].ends;
    let mut stack = vec![if a == v { b } else { a }];
    let mut seen: BTreeSet<usize> = [v, stack[0]].into();
    while let Some(u) = stack.pop() {
        for (k, edge) in cc.edges.iter().enumerate() {
            if edge.ends.contains(&u) && !edges.contains(&k) {
                let w = if edge.ends[0] == u { edge.ends[1] } else { edge.ends[0] };
                if seen.insert(w) {
                    edges.push(k);
                    stack.push(w);
                }
            }
        }
    }
    edges
}

/// Cuts a tree at a random vertex of degree at least 2 or at a random
/// interior point of an edge, and groups the branches into two pieces.
fn random_split(cc: &CentralComplex, rng: &mut ChaCha8Rng) -> (CentralComplex, Subcomplex, Subcomplex) {
    let inner: Vec<usize> = (0..cc.vertices.len()).filter(|&v| cc.degree(v) >= 2).collect();
    let (cc, v) = if inner.is_empty() || rng.random_bool(0.5) {
        let e = rng.random_range(0..cc.edges.len());
        cc.subdivide(e, rng.random_range(0.2..0.8)).unwrap()
    } else {
        (cc.clone(), inner[rng.random_range(0..inner.len())])
    };
    let incident: Vec<usize> = (0..cc.edges.len()).filter(|&e| cc.edges[e].ends.contains(&v)).collect();
    let first = rng.random_range(0..incident.len());
    let mut x_edges = Vec::new();
    let mut y_edges = Vec::new();
    for (k, &e) in incident.iter().enumerate() {
        let to_x = k == first || (k != (first + 1) % incident.len() && rng.random_bool(0.5));
        if to_x {
            x_edges.extend(branch(&cc, v, e));
        } else {
            y_edges.extend(branch(&cc, v, e));
        }
    }
    let x = Subcomplex::from_edges(&cc, x_edges).unwrap();
    let y = Subcomplex::from_edges(&cc, y_edges).unwrap();
    (cc, x, y)
}

pub fn splits() -> Outcome {
    let opts = CheckOptions { samples: SPLIT_SAMPLES, ..CheckOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut done, mut exact, mut worst_eq1, mut bad) = (0, 0, 0.0f64, Vec::new());
    let mut seed = 6000;
    while done < 120 {
        seed += 1;
        let surface = SURFACES[done % 3];
        let scene = random_scene(surface, 3 + (seed % 4) as usize, seed, Want::SimplyConnected).unwrap();
        let Ok(cc) = complex(&scene) else {
            bad.push(format!("seed {seed}: no complex"));
            done += 1;
            continue;
        };
        if cc.edges.is_empty() {
            continue;
        }
        let (cc, x, y) = random_split(&cc, &mut rng);
        done += 1;
        match split_check(&cc, &x, &y, None, &CheckOptions { seed, ..opts }) {
            Ok(r) => {
                let all_exact = r.x.exact && r.y.exact && r.xy.exact;
                if all_exact {
                    exact += 1;
                    worst_eq1 = worst_eq1.max(r.eq1_residual.abs());
                    if r.eq1_residual.abs() > AREA_TOL {
                        bad.push(format!("seed {seed}: eq1 {:.2e}", r.eq1_residual));
                    }
                }
                if !r.intersection_defect.agrees_with(0.0, SIGMAS) {
                    bad.push(format!("seed {seed}: defect {:.2e}", r.intersection_defect.mean));
                }
            }
            Err(e) => bad.push(format!("seed {seed}: {e}")),
        }
    }
    Outcome {
        pass: bad.is_empty() && exact >= 100,
        detail: format!(
            "{done} splits ({exact} on the exact path), worst |eq1| {worst_eq1:.2e} (limit {AREA_TOL:e}), defect within {SIGMAS} sigma at n={SPLIT_SAMPLES}; failures: {}",
            if bad.is_empty() { "none".into() } else { bad.join(", ") }
        ),
    }
}

pub fn fold_sweep() -> Outcome {
    let opts = CheckOptions { samples: SWEEP_SAMPLES, ..CheckOptions::default() };
    let mut lines = Vec::new();
    let mut pass = true;
    for s in SURFACES {
        let (mut holds, mut violated, mut inconclusive, mut errors, mut cert_agree, mut cert_total) = (0, 0, 0, 0, 0, 0);
        let mut notes = Vec::new();
        for i in 0..SWEEP_PER_SURFACE {
            let seed = 7000 + i;
            let scene = random_scene(s, 2 + (i % 5) as usize, seed, Want::SimplyConnected).unwrap();
            let scene = with_random_folds(&scene, 1 + (i % 4) as usize, seed);
            let Some(Contraction::Piecewise(f)) = scene.contraction().unwrap() else { unreachable!() };
            let poly = validate(&scene.config().unwrap()).unwrap();
            let inst = KPInstance { polytope: poly.clone(), contraction: Contraction::Piecewise(f.clone()) };
            let report = match kp_verify(&inst, &CheckOptions { seed, ..opts }) {
                Ok(r) => r,
                Err(e) => {
                    errors += 1;
                    notes.push(format!("seed {seed}: {e}"));
                    continue;
                }
            };
            match report.verdict {
                Verdict::Holds => holds += 1,
                Verdict::Violated => {
                    violated += 1;
                    notes.push(format!("seed {seed}: violated by {:.2e}", report.residual));
                }
                Verdict::Inconclusive => inconclusive += 1,
            }
            let cc = central_set(&poly).unwrap();
            if cc.is_tree() {
                cert_total += 1;
                match peel_certificate(&cc, &f, &CheckOptions { seed, ..opts }) {
                    Ok(c) => {
                        let refined = report.area_after_refined.unwrap();
                        let same_area = !(c.area_after.exact && refined.exact)
                            || (c.area_after.value - refined.value).abs() <= AREA_TOL;
                        if c.verdict == report.verdict && same_area {
                            cert_agree += 1;
                        } else {
                            notes.push(format!("seed {seed}: certificate {:?} vs {:?}", c.verdict, report.verdict));
                        }
                    }
                    Err(e) => notes.push(format!("seed {seed}: certificate {e}")),
                }
            }
        }
        let total = SWEEP_PER_SURFACE as f64;
        let rate = (inconclusive + errors) as f64 / total;
        let ok = violated == 0 && rate < MAX_INCONCLUSIVE_RATE && cert_agree == cert_total;
        pass &= ok;
        notes.truncate(5);
        lines.push(format!(
            "{}: {holds} holds, {violated} violated, {inconclusive} inconclusive, {errors} errors, certificates {cert_agree}/{cert_total}{}",
            s.name(),
            if notes.is_empty() { String::new() } else { format!(" [{}]", notes.join("; ")) }
        ));
    }
    Outcome { pass, detail: format!("{}; inconclusive limit {MAX_INCONCLUSIVE_RATE}", lines.join("; ")) }
}

fn moved(config: &BallConfiguration, f: &PiecewiseIsometry) -> BallConfiguration {
    let disks = config.disks().iter().map(|d| Disk::new(f.apply(&d.center).unwrap(), d.radius)).collect();
    BallConfiguration::new(config.surface(), disks).unwrap()
}

pub fn spherical() -> Outcome {
    let s = Surface::Spherical;
    let opts = CheckOptions { samples: SWEEP_SAMPLES, ..CheckOptions::default() };
    let large = SceneParams { radius: (FRAC_PI_2, FRAC_PI_2 + 0.6), offset: (0.45, 0.85) };
    let small = SceneParams { radius: (0.5, FRAC_PI_2), offset: (0.1, 0.4) };
    let (mut large_bad, mut large_doubt, mut small_bad, mut small_doubt) = (Vec::new(), 0, Vec::new(), 0);
    for i in 0..50u64 {
        let seed = 8000 + i;
        let scene = random_scene_with(s, 2 + (i % 4) as usize, seed, Want::Any, large).unwrap();
        let config = scene.config().unwrap();
        let f = PiecewiseIsometry::from_folds(s, &fold_lines(s, &random_folds(&config, 1 + (i % 3) as usize, seed)));
        let before = area_of(&config, &opts, 0).unwrap();
        let after = area_of(&moved(&config, &f), &CheckOptions { seed, ..opts }, 1).unwrap();
        match compare(after.value, before.value, (after.std_error.powi(2) + before.std_error.powi(2)).sqrt(), AREA_TOL) {
            Verdict::Holds => {}
            Verdict::Violated => large_bad.push(format!("seed {seed}: {:.2e}", after.value - before.value)),
            Verdict::Inconclusive => large_doubt += 1,
        }

        let scene = random_scene_with(s, 2 + (i % 4) as usize, seed, Want::Any, small).unwrap();
        let config = scene.config().unwrap();
        let f = PiecewiseIsometry::from_folds(s, &fold_lines(s, &random_folds(&config, 1 + (i % 3) as usize, seed)));
        match (intersection_area_sphere(&config), intersection_area_sphere(&moved(&config, &f))) {
            (Ok(b), Ok(a)) if a < b - AREA_TOL => small_bad.push(format!("seed {seed}: {:.2e}", a - b)),
            (Ok(_), Ok(_)) => {}
            _ => small_doubt += 1,
        }
    }
    Outcome {
        pass: large_bad.is_empty() && small_bad.is_empty(),
        detail: format!(
            "50 large-disk scenes: {} increases ({large_doubt} inconclusive); 50 small-disk scenes: {} intersection decreases ({small_doubt} degenerate); tolerance {AREA_TOL:e}{}",
            large_bad.len(),
            small_bad.len(),
            if large_bad.is_empty() && small_bad.is_empty() { String::new() } else {
                format!(" [{}]", large_bad.iter().chain(&small_bad).cloned().collect::<Vec<_>>().join("; "))
            }
        ),
    }
}

fn random_interior_point(config: &BallConfiguration, rng: &mut ChaCha8Rng) -> Point {
    let s = config.surface();
    let d = &config.disks()[rng.random_range(0..config.disks().len())];
    let (u, v) = s.frame(&d.center);
    let th: f64 = rng.random_range(0.0..TAU);
    let dist = d.radius * 0.999 * rng.random_range(0.0..1.0f64).sqrt();
    s.exp(&d.center, &(u * th.cos() + v * th.sin()), dist)
}

pub fn relative() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut lines = Vec::new();
    let mut pass = true;
    for s in SURFACES {
        let (mut tested, mut empty, mut disconnected, mut errors) = (0, 0, 0, 0);
        let scenes = scene_set(s, 50, 9000);
        for scene in &scenes {
            let cc = complex(scene).unwrap();
            let config = scene.config().unwrap();
            for _ in 0..RELATIVE_PER_SURFACE / scenes.len() {
                let p = random_interior_point(&config, &mut rng);
                tested += 1;
                match relative_central_set(&cc, &p) {
                    Ok(r) if r.is_empty() => empty += 1,
                    Ok(r) if !r.is_connected(&cc) => disconnected += 1,
                    Ok(_) => {}
                    Err(_) => errors += 1,
                }
            }
        }
        pass &= empty + disconnected + errors == 0 && tested >= RELATIVE_PER_SURFACE;
        lines.push(format!("{}: {tested} points, {empty} empty, {disconnected} disconnected, {errors} errors", s.name()));
    }
    Outcome { pass, detail: lines.join("; ") }
}

pub fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut mismatches = Vec::new();
    let mut runs = 0;
    for (k, s) in SURFACES.into_iter().enumerate() {
        let scene = with_random_folds(&random_scene(s, 4, 42 + k as u64, Want::SimplyConnected).unwrap(), 2, 42);
        let path = dir.path().join(format!("{}.json", s.name()));
        std::fs::write(&path, to_json(&scene)).unwrap();
        let p = path.to_str().unwrap();
        let commands: [&[&str]; 6] = [
            &["verify-kp", "--oracle", "--samples", "100000"],
            &["certificate", "--samples", "100000"],
            &["split-check", "--samples", "100000"],
            &["area", "--oracle", "--samples", "100000"],
            &["central-set"],
            &["render"],
        ];
        for cmd in commands {
            let mut argv = vec!["kpcentral"];
            argv.extend_from_slice(cmd);
            argv.extend(["--scene", p, "--seed", "7"]);
            let args = Args::parse_from(&argv);
            let (a, b) = (run(&args), run(&args));
            runs += 1;
            if a != b || a.exit_code == 1 {
                mismatches.push(format!("{} {}", s.name(), cmd[0]));
            }
        }
    }
    let args = Args::parse_from(["kpcentral", "random", "--surface", "hyperbolic", "--folds", "3", "--seed", "11"]);
    runs += 1;
    if run(&args) != run(&args) {
        mismatches.push("random".into());
    }
    // sampling does not depend on the worker count
    let config = euclidean_scenes()[3].config().unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = single.install(|| mc_union_area(&config, 200_000, 3).unwrap());
    let b = mc_union_area(&config, 200_000, 3).unwrap();
    runs += 1;
    if a != b {
        mismatches.push("thread count".into());
    }
    let cc = complex(&euclidean_scenes()[3]).unwrap();
    let whole = Subcomplex::whole(&cc);
    runs += 1;
    if sub_union(&cc, &whole).unwrap().disks() != sub_union(&cc, &whole).unwrap().disks() {
        mismatches.push("sub_union".into());
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "{runs} repeated runs byte-identical and successful; mismatches: {}",
            if mismatches.is_empty() { "none".into() } else { mismatches.join(", ") }
        ),
    }
}
