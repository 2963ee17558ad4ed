//! Area identities for a central set split into two closed pieces.

use serde::Serialize;

use super::mc::{mc_area, union_window, MonteCarloEstimate};
use super::{area_of, mapped_sub_union, AreaValue, CheckError, CheckOptions};
use crate::central_set::{sub_union, CentralComplex, Subcomplex};
use crate::contraction::PiecewiseIsometry;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MappedAreas {
    pub whole: AreaValue,
    pub x: AreaValue,
    pub y: AreaValue,
    pub xy: AreaValue,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitReport {
    pub whole: AreaValue,
    pub x: AreaValue,
    pub y: AreaValue,
    pub xy: AreaValue,
    /// `area(U) − area(U_X) − area(U_Y) + area(U_{X∩Y})`.
    pub eq1_residual: f64,
    /// Sampled area of `(U_X ∩ U_Y) Δ U_{X∩Y}`.
    pub intersection_defect: MonteCarloEstimate,
    pub mapped: Option<MappedAreas>,
    /// `area(U_{X,f}) + area(U_{Y,f}) − area(U_{X∩Y,f}) − area(U_f)`.
    pub eq2_slack: Option<f64>,
    /// `(area(U_X) + area(U_Y) − area(U_{X,f}) − area(U_{Y,f})) − (area(U_{X∩Y}) − area(U_{X∩Y,f}))`.
    pub general_case_slack: Option<f64>,
}

/// Checks the splitting identities for `X ∪ Y = C_U`. With a map `f`, the
/// moved unions use every vertex of each piece, so `f` should be an
/// isometry on each edge (see `refine_complex`).
pub fn split_check(
    cc: &CentralComplex,
    x: &Subcomplex,
    y: &Subcomplex,
    f: Option<&PiecewiseIsometry>,
    opts: &CheckOptions,
) -> Result<SplitReport, CheckError> {
    if !x.covers_with(y, cc) {
        return Err(CheckError::NotACover);
    }
    let xy = x.intersection(y);
    let whole_cfg = sub_union(cc, &Subcomplex::whole(cc))?;
    let x_cfg = sub_union(cc, x)?;
    let y_cfg = sub_union(cc, y)?;
    let xy_cfg = sub_union(cc, &xy)?;

    let whole = AreaValue::exact(cc.source().union_area());
    let ax = area_of(&x_cfg, opts, 11)?;
    let ay = area_of(&y_cfg, opts, 12)?;
    let axy = area_of(&xy_cfg, opts, 13)?;

    let window = union_window(&[&whole_cfg, &x_cfg, &y_cfg]);
    let intersection_defect = mc_area(
        cc.surface,
        |p| (x_cfg.contains_strict(p) && y_cfg.contains_strict(p)) != xy_cfg.contains_strict(p),
        &window,
        opts.samples,
        opts.seed,
    )?;

    let (mapped, eq2_slack, general_case_slack) = match f {
        None => (None, None, None),
        Some(f) => {
            let m = MappedAreas {
                whole: area_of(&mapped_sub_union(cc, &Subcomplex::whole(cc), f)?, opts, 21)?,
                x: area_of(&mapped_sub_union(cc, x, f)?, opts, 22)?,
                y: area_of(&mapped_sub_union(cc, y, f)?, opts, 23)?,
                xy: area_of(&mapped_sub_union(cc, &xy, f)?, opts, 24)?,
            };
            let eq2 = m.x.value + m.y.value - m.xy.value - m.whole.value;
            let general = (ax.value + ay.value - m.x.value - m.y.value) - (axy.value - m.xy.value);
            (Some(m), Some(eq2), Some(general))
        }
    };

    Ok(SplitReport {
        eq1_residual: whole.value - ax.value - ay.value + axy.value,
        whole,
        x: ax,
        y: ay,
        xy: axy,
        intersection_defect,
        mapped,
        eq2_slack,
        general_case_slack,
    })
}
