//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
//! criterion fails. Tolerances and sample sizes are pinned below.

mod criteria;
mod grid;

use std::time::Instant;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

type Criterion = fn() -> Outcome;

fn main() {
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let all: [(u32, &str, Criterion); 9] = [
        (1, "two-disk fold", criteria::two_disk_fold),
        (2, "central set vs grid oracle", criteria::grid_oracle),
        (3, "reconstruction covers the union exactly", criteria::reconstruction),
        (4, "vertex and edge counts match the Euler characteristic", criteria::euler),
        (5, "split identities", criteria::splits),
        (6, "area sweep under random folds", criteria::fold_sweep),
        (7, "spherical large and small disks", criteria::spherical),
        (8, "relative central sets", criteria::relative),
        (9, "determinism", criteria::determinism),
    ];
    let mut failed = 0;
    for (id, name, run) in all {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {id} [{name}]: {verdict} ({}; {:.1}s)", out.detail, start.elapsed().as_secs_f64());
        if !out.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
