//! Closed-form areas and sectional lower bounds for films on the wedge.
//!
//! Sections are taken by the planes `x = h t`, `t ∈ [-1, 1]`; the wedge cuts
//! each in a rectangle with sides `1 + |t|` and `1 - |t|`.

use serde::Serialize;
use thiserror::Error;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// `2 - √3`, where the Steiner branch and the `2 + 2|t|` branch cross.
pub const STEINER_SWITCH: f64 = 2.0 - SQRT3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("tau = {0} is outside the admissible interval (0, 2(2-√3))")]
    InadmissibleTau(f64),
    #[error("margin does not change sign on h ∈ [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub lower: f64,
    pub upper: Option<f64>,
    pub formula_id: &'static str,
}

/// Steiner tree length of the section rectangle.
pub fn steiner_section_length(t: f64) -> f64 {
    1.0 + SQRT3 - (SQRT3 - 1.0) * t.abs()
}

/// Lower bound on the section length of any admissible film at `x = h t`.
pub fn section_lower_bound(t: f64, s: f64) -> f64 {
    let at = t.abs();
    if at <= s {
        2.0 - 2.0 * at
    } else {
        steiner_section_length(at).min(2.0 + 2.0 * at)
    }
}

/// Coarea lower bound for the minimal film area on `M_{h,s}`.
pub fn min_f_lower_bound(h: f64, s: f64) -> f64 {
    if s < STEINER_SWITCH {
        2.0 * h * (4.0 - SQRT3 - 2.0 * s * s)
    } else {
        h * (3.0 + SQRT3 - 2.0 * (SQRT3 - 1.0) * s - (3.0 - SQRT3) * s * s)
    }
}

pub fn min_f_bounds(h: f64, s: f64) -> BoundsReport {
    BoundsReport {
        lower: min_f_lower_bound(h, s),
        upper: None,
        formula_id: "coarea-section-bound",
    }
}

/// Area bracket for the minimal film spanning the four long edges only.
pub fn skew_bounds(h: f64) -> BoundsReport {
    BoundsReport {
        lower: 2.0 * h,
        upper: Some(skew_faceted_area(h)),
        formula_id: "skew-quadrilateral",
    }
}

/// Area of the faceted surface spanning the skew quadrilateral.
pub fn skew_faceted_area(h: f64) -> f64 {
    (4.0 * h * h + 1.0).sqrt() + 1.0
}

/// Area of the frame facet with the apex on one side and the short edge on
/// the other.
pub fn facet_area(h: f64) -> f64 {
    (4.0 * h * h + 1.0).sqrt()
}

/// Exact area of the four frame-face pieces of the competitor inside
/// `|x| < h tau`.
pub fn competitor_slab_area(h: f64, tau: f64) -> f64 {
    (2.0 + tau) * tau * facet_area(h)
}

/// Upper estimate of the competitor's area inside `|x| ≤ h tau`, with the
/// vertical pieces bounded by 3.
pub fn competitor_central_area(h: f64, tau: f64) -> f64 {
    competitor_slab_area(h, tau) + 3.0
}

/// Steiner-bound lower estimate of any conelike film inside `|x| < h tau`.
pub fn cone_central_lower_bound(h: f64, tau: f64) -> f64 {
    2.0 * (1.0 + SQRT3) * h * tau - (SQRT3 - 1.0) * h * tau * tau
}

/// Open interval of `tau` for which `4 + 2 tau < 2(1+√3) - (√3-1) tau`.
pub fn admissible_tau_interval() -> (f64, f64) {
    (0.0, 2.0 * (2.0 - SQRT3))
}

pub fn is_admissible_tau(tau: f64) -> bool {
    let (lo, hi) = admissible_tau_interval();
    tau > lo && tau < hi
}

/// `R - L`: positive when the competitor beats the conelike lower bound.
pub fn comparison_margin(h: f64, tau: f64) -> f64 {
    let left = competitor_central_area(h, tau) / (h * tau);
    let right = 2.0 * (1.0 + SQRT3) - (SQRT3 - 1.0) * tau;
    right - left
}

/// Limit of the margin as `h -> ∞`.
pub fn comparison_margin_limit(tau: f64) -> f64 {
    2.0 * (1.0 + SQRT3) - (SQRT3 - 1.0) * tau - (4.0 + 2.0 * tau)
}

pub const CROSSOVER_BRACKET: (f64, f64) = (1.0, 1.0e6);

/// Unique `h` with `comparison_margin(h, tau) = 0`, by bisection to `1e-9`.
pub fn crossover_h(tau: f64) -> Result<f64, AnalyticsError> {
    if !is_admissible_tau(tau) {
        return Err(AnalyticsError::InadmissibleTau(tau));
    }
    let (mut lo, mut hi) = CROSSOVER_BRACKET;
    let f = |h: f64| comparison_margin(h, tau);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(AnalyticsError::NoBracket { lo, hi });
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lower bound inside `|x| < h tau` for a film whose sections separate the
/// four rectangle sides once `|t| > s`.
pub fn steinerlike_central_lower_bound(h: f64, s: f64, tau: f64) -> f64 {
    h * ((2.0 + 2.0 * SQRT3) * tau
        - (SQRT3 - 1.0) * tau * tau
        - (2.0 * SQRT3 - 2.0) * s
        - (3.0 - SQRT3) * s * s)
}
