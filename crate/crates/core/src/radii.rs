//! Radii of meromorphic starlikeness and convexity for V(α, η), plus a
//! bisection oracle that measures the radius of a concrete function.
//!
//! With |zf′/f + 1| ≤ 1 − δ as the starlikeness condition, the triangle
//! inequality reduces it to Σ (k+2−δ) a_k r^{k+1} ≤ 1 − δ. The convexity
//! condition |zf″/f′ + 2| ≤ 1 − ϰ uses zf″ + 2f′ = Σ k(k+1) a_k z^{k−1} and
//! reduces to Σ k(k+2−ϰ) a_k r^{k+1} ≤ 1 − ϰ. Comparing term by term with the
//! coefficient condition gives the per-index radii
//!
//! ```text
//! starlike: [w_k (1−δ) / (2η(1−α)(k+2−δ))]^{1/(k+1)}
//! convex:   [w_k (1−ϰ) / (2η(1−α) k (k+2−ϰ))]^{1/(k+1)}
//! ```
//!
//! where w_k = k σ_k C(k) is the coefficient weight. Both are exact for the
//! single-term extremal functions. The `printed` column of the table holds
//! the same expressions with σ_k C(k) in place of w_k and no k in the convex
//! denominator; for convexity the two coincide.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::class_v::ClassParams;
use crate::error::{Error, Result};
use crate::gamma_kernel::{ln_sigma_k, WrightParams};
use crate::mero_series::MeroFunction;

pub const DEFAULT_ANGLES: usize = 720;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusCondition {
    /// |zf′/f + 1| ≤ 1 − order
    Starlike { order: f64 },
    /// |zf″/f′ + 2| ≤ 1 − order
    Convex { order: f64 },
}

impl RadiusCondition {
    pub fn order(&self) -> f64 {
        match *self {
            RadiusCondition::Starlike { order } | RadiusCondition::Convex { order } => order,
        }
    }

    pub fn bound(&self) -> f64 {
        1.0 - self.order()
    }

    pub fn validate(&self) -> Result<()> {
        let o = self.order();
        if !(0.0..1.0).contains(&o) {
            return Err(Error::Domain(format!("order must lie in [0, 1), got {o}")));
        }
        Ok(())
    }

    /// The modulus constrained by the condition at z; +∞ where f (or f′)
    /// vanishes or the value is not finite.
    pub fn value(&self, f: &MeroFunction, z: Complex64) -> f64 {
        let (num, den, shift) = match self {
            RadiusCondition::Starlike { .. } => {
                (f.evaluate_d1_unchecked(z), f.evaluate_unchecked(z), 1.0)
            }
            RadiusCondition::Convex { .. } => {
                (f.evaluate_d2_unchecked(z), f.evaluate_d1_unchecked(z), 2.0)
            }
        };
        if den.norm() == 0.0 {
            return f64::INFINITY;
        }
        let v = (z * num / den + shift).norm();
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailTrend {
    Increasing,
    Decreasing,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusRow {
    pub k: usize,
    /// Unclamped per-index radius.
    pub candidate: f64,
    pub printed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub condition: RadiusCondition,
    /// min(1, min_k candidate)
    pub radius: f64,
    pub attained_k: usize,
    pub k_max: usize,
    pub per_k: Vec<RadiusRow>,
    /// Trend of the last (up to) five candidates.
    pub tail_trend: TailTrend,
}

fn radius_table(
    cp: &ClassParams,
    wp: &WrightParams,
    condition: RadiusCondition,
    k_max: usize,
) -> Result<RadiusResult> {
    condition.validate()?;
    if k_max < 1 {
        return Err(Error::Domain("k_max must be ≥ 1".into()));
    }
    let order = condition.order();
    let ln_rhs = cp.rhs().ln();
    let mut per_k = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let kf = k as f64;
        // ln(σ_k C(k)(1−o)) − ln(2η(1−α)(k+2−o))
        let ln_common = ln_sigma_k(wp, k)? + cp.bracket(k).ln() + (1.0 - order).ln()
            - ln_rhs
            - (kf + 2.0 - order).ln();
        let ln_candidate = match condition {
            RadiusCondition::Starlike { .. } => ln_common + kf.ln(),
            RadiusCondition::Convex { .. } => ln_common,
        };
        per_k.push(RadiusRow {
            k,
            candidate: (ln_candidate / (kf + 1.0)).exp(),
            printed: (ln_common / (kf + 1.0)).exp(),
        });
    }
    let (attained_k, min_candidate) = per_k
        .iter()
        .map(|row| (row.k, row.candidate.min(1.0)))
        .fold(
            (1, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        );
    let tail: Vec<f64> = per_k
        .iter()
        .rev()
        .take(5)
        .rev()
        .map(|row| row.candidate)
        .collect();
    let tail_trend = if tail.windows(2).all(|w| w[1] >= w[0]) {
        TailTrend::Increasing
    } else if tail.windows(2).all(|w| w[1] <= w[0]) {
        TailTrend::Decreasing
    } else {
        TailTrend::Mixed
    };
    Ok(RadiusResult {
        condition,
        radius: min_candidate,
        attained_k,
        k_max,
        per_k,
        tail_trend,
    })
}

/// Every member of V(α, η) is meromorphically starlike of order δ in
/// |z| < radius.
pub fn starlike_radius(
    cp: &ClassParams,
    wp: &WrightParams,
    delta: f64,
    k_max: usize,
) -> Result<RadiusResult> {
    radius_table(cp, wp, RadiusCondition::Starlike { order: delta }, k_max)
}

/// Every member of V(α, η) is meromorphically convex of order ϰ in
/// |z| < radius.
pub fn convex_radius(
    cp: &ClassParams,
    wp: &WrightParams,
    kappa: f64,
    k_max: usize,
) -> Result<RadiusResult> {
    radius_table(cp, wp, RadiusCondition::Convex { order: kappa }, k_max)
}

/// Largest sampled max of the condition on |z| = r.
pub(crate) fn circle_max(
    f: &MeroFunction,
    condition: &RadiusCondition,
    r: f64,
    angles: usize,
) -> f64 {
    (0..angles)
        .map(|j| {
            let z = Complex64::from_polar(r, j as f64 * std::f64::consts::TAU / angles as f64);
            condition.value(f, z)
        })
        .fold(0.0, f64::max)
}

/// Bisection for the largest r in (0, 1] at which the condition holds on
/// `angles` equally spaced points of |z| = r. Returns 1.0 if it holds up to
/// the boundary; the returned radius is a point where the condition was
/// observed to hold, within `tol` of the crossing.
pub fn numeric_radius(
    f: &MeroFunction,
    condition: RadiusCondition,
    tol: f64,
    angles: usize,
) -> Result<f64> {
    condition.validate()?;
    if !(tol > 0.0 && tol < 0.5) {
        return Err(Error::Domain(format!(
            "tolerance must lie in (0, 0.5), got {tol}"
        )));
    }
    if angles < 8 {
        return Err(Error::Domain(format!(
            "need at least 8 angles, got {angles}"
        )));
    }
    let bound = condition.bound();
    let holds = |r: f64| circle_max(f, &condition, r, angles) <= bound;

    let top = 1.0 - tol / 4.0;
    if holds(top) {
        return Ok(1.0);
    }
    let mut lo = tol;
    if !holds(lo) {
        return Err(Error::Degenerate(format!(
            "condition already fails at r = {lo}; no radius can be bracketed"
        )));
    }
    let mut hi = top;
    while hi - lo > tol / 2.0 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
