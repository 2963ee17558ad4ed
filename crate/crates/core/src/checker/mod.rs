//! Verification of area inequalities for contracted disk unions.

pub mod certificate;
pub mod kp;
pub mod mc;
pub mod split;

use serde::Serialize;
use thiserror::Error;

use crate::ball_union::{validate, BallConfiguration, UnionError};
use crate::central_set::{CentralComplex, CentralSetError, Subcomplex};
use crate::contraction::{ContractionError, PiecewiseIsometry};
use crate::geom::{Disk, EPS_AREA};

pub use certificate::{peel_certificate, Certificate, PeelStep};
pub use kp::{inclusion_check, kp_verify, Contraction, InclusionReport, KPInstance, KPReport};
pub use mc::{mc_area, mc_union_area, union_window, McError, MonteCarloEstimate, Window};
pub use split::{split_check, SplitReport};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CheckError {
    #[error("map is not a contraction: points {0} and {1} move apart by {2:e}")]
    NotAContraction(usize, usize, f64),
    #[error("piecewise isometry failed validation: {0}")]
    ValidationFailure(String),
    #[error("the two subcomplexes do not cover the central set")]
    NotACover,
    #[error("central set is not a tree (V - E = {0})")]
    NotATree(i64),
    #[error("map is not an isometry on refined edge {0}")]
    RefinementFailure(usize),
    #[error("operation needs a piecewise isometry, not a center map")]
    NeedsPiecewise,
    #[error(transparent)]
    Union(#[from] UnionError),
    #[error(transparent)]
    CentralSet(#[from] CentralSetError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    MonteCarlo(#[from] McError),
}

/// Shared knobs of the checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckOptions {
    pub tolerance: f64,
    pub samples: u64,
    pub seed: u64,
    /// Also estimate exact areas by sampling and report the agreement.
    pub oracle: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { tolerance: EPS_AREA, samples: 1_000_000, seed: 0, oracle: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Holds => 0,
            Verdict::Violated => 2,
            Verdict::Inconclusive => 3,
        }
    }

    /// Combines independent verdicts: any violation wins, then any doubt.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Violated, _) | (_, Verdict::Violated) => Verdict::Violated,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Holds,
        }
    }
}

/// An area, exact when the configuration validates and sampled otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AreaValue {
    pub value: f64,
    /// Zero for exact values.
    pub std_error: f64,
    pub exact: bool,
}

impl AreaValue {
    pub fn exact(value: f64) -> AreaValue {
        AreaValue { value, std_error: 0.0, exact: true }
    }
}

pub fn area_of(config: &BallConfiguration, opts: &CheckOptions, salt: u64) -> Result<AreaValue, CheckError> {
    match validate(config) {
        Ok(poly) => Ok(AreaValue::exact(poly.union_area())),
        Err(UnionError::SphereCovered) => Ok(AreaValue::exact(4.0 * std::f64::consts::PI)),
        Err(_) => {
            let est = mc_union_area(config, opts.samples, opts.seed.wrapping_add(salt))?;
            Ok(AreaValue { value: est.mean, std_error: est.std_error, exact: false })
        }
    }
}

/// Decides `lhs ≤ rhs` given exact or sampled values.
pub fn compare(lhs: f64, rhs: f64, sigma: f64, tolerance: f64) -> Verdict {
    let diff = lhs - rhs;
    if sigma == 0.0 {
        if diff <= tolerance {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    } else if diff + 4.0 * sigma < 0.0 {
        Verdict::Holds
    } else if diff - 4.0 * sigma > tolerance {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

/// Disks at every vertex of `x`, moved by `f`.
pub fn mapped_sub_union(cc: &CentralComplex, x: &Subcomplex, f: &PiecewiseIsometry) -> Result<BallConfiguration, CheckError> {
    let disks = x
        .vertices
        .iter()
        .map(|&v| Ok(Disk::new(f.apply(&cc.vertices[v].point)?, cc.vertices[v].radius)))
        .collect::<Result<Vec<_>, CheckError>>()?;
    Ok(BallConfiguration::new(cc.surface, disks)?)
}
