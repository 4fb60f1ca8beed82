//! The class V(α, η): coefficient membership, sharp coefficient bounds,
//! extremal functions and the growth/distortion envelopes.
//!
//! A function f ∈ Σ_q belongs to V(α, η) when the image F = W f satisfies
//! |(zF″/F′ + 2) / (zF″/F′ + 2α)| < η on the punctured disk. Writing
//! C(k) = k(1+η) + (1 + η(2α−1)), the identity zF″ + 2F′ = Σ k(k+1)σ_k a_k z^{k−1}
//! turns this into the coefficient condition
//!
//! ```text
//! Σ k·σ_k·C(k)·a_k ≤ 2η(1−α)
//! ```
//!
//! which is sufficient for every f ∈ Σ_q and sharp for single-term functions.
//! The factor k in the weight is essential: without it the extremal
//! functions for k ≥ 2 violate the ratio condition near the boundary.
//! [`printed_coefficient_weight`] keeps the k-less weight for comparison.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma_kernel::{sigma_k, WrightParams};
use crate::mero_series::MeroFunction;

/// Relative slack (against 2η(1−α)) under which a margin still counts as
/// non-negative. Saturated functions land within a few ulps of zero.
pub const MARGIN_SLACK: f64 = 1e-12;

/// The pair (α, η) with 0 < α < 1 and 0 < η ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClassParams")]
pub struct ClassParams {
    alpha: f64,
    eta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClassParams {
    alpha: f64,
    eta: f64,
}

impl TryFrom<RawClassParams> for ClassParams {
    type Error = Error;

    fn try_from(raw: RawClassParams) -> Result<Self> {
        ClassParams::new(raw.alpha, raw.eta)
    }
}

impl ClassParams {
    pub fn new(alpha: f64, eta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must lie in (0, 1], got {eta}"
            )));
        }
        Ok(Self { alpha, eta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// 2η(1−α), the right-hand side of the coefficient condition.
    pub fn rhs(&self) -> f64 {
        rhs(self.alpha, self.eta)
    }

    /// C(k) = k(1+η) + (1 + η(2α−1))
    pub fn bracket(&self, k: usize) -> f64 {
        bracket(self.alpha, self.eta, k)
    }

    /// Whether a margin counts as membership, allowing [`MARGIN_SLACK`].
    pub fn accepts_margin(&self, margin: f64) -> bool {
        margin >= -MARGIN_SLACK * self.rhs()
    }
}

fn rhs(alpha: f64, eta: f64) -> f64 {
    2.0 * eta * (1.0 - alpha)
}

fn bracket(alpha: f64, eta: f64, k: usize) -> f64 {
    k as f64 * (1.0 + eta) + (1.0 + eta * (2.0 * alpha - 1.0))
}

/// k·σ_k·C(k)
pub fn coefficient_weight(cp: &ClassParams, wp: &WrightParams, k: usize) -> Result<f64> {
    Ok(k as f64 * printed_coefficient_weight(cp, wp, k)?)
}

/// σ_k·C(k), the weight without the factor k. Not a valid membership
/// criterion for k ≥ 2; exposed so reports can show both.
pub fn printed_coefficient_weight(cp: &ClassParams, wp: &WrightParams, k: usize) -> Result<f64> {
    Ok(sigma_k(wp, k)? * cp.bracket(k))
}

/// 2η(1−α) − Σ_k weight(k)·a_k. Non-negative margin means membership.
pub fn membership_margin(f: &MeroFunction, cp: &ClassParams, wp: &WrightParams) -> Result<f64> {
    f.require_nonnegative()?;
    margin_at_order(f, cp.alpha, cp.eta, wp)
}

/// The margin expression evaluated at an arbitrary real order in place of η.
///
/// The expression is a polynomial in the order, so this is meaningful for
/// orders outside (0, 1] as well; closure orders produced by
/// [`crate::closure`] are checked against it even when they leave the
/// admissible range.
pub fn margin_at_order(f: &MeroFunction, alpha: f64, order: f64, wp: &WrightParams) -> Result<f64> {
    let mut weighted = 0.0;
    for (k, a) in f.terms() {
        if a != 0.0 {
            weighted += k as f64 * (sigma_k(wp, k)? * bracket(alpha, order, k)) * a;
        }
    }
    Ok(rhs(alpha, order) - weighted)
}

/// Largest admissible a_k: 2η(1−α) / weight(k).
pub fn coefficient_bound(cp: &ClassParams, wp: &WrightParams, k: usize) -> Result<f64> {
    Ok(cp.rhs() / coefficient_weight(cp, wp, k)?)
}

/// f_k(z) = 1/z + coefficient_bound(k)·z^k, the single-term member on the
/// boundary of the coefficient condition.
pub fn extremal_function(cp: &ClassParams, wp: &WrightParams, k: usize) -> Result<MeroFunction> {
    MeroFunction::single_term(k, coefficient_bound(cp, wp, k)?)
}

/// Two-sided bound on a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub lower: f64,
    pub upper: f64,
}

/// B = η(1−α) / (σ_1(1+αη)), the k = 1 coefficient bound.
pub fn envelope_constant(cp: &ClassParams, wp: &WrightParams) -> Result<f64> {
    coefficient_bound(cp, wp, 1)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("radius must lie in (0, 1), got {r}")));
    }
    Ok(())
}

/// (1/r − rB, 1/r + rB). The lower value is not clamped at zero.
pub fn growth_bounds(cp: &ClassParams, wp: &WrightParams, r: f64) -> Result<Envelope> {
    check_radius(r)?;
    let b = envelope_constant(cp, wp)?;
    Ok(Envelope {
        lower: 1.0 / r - r * b,
        upper: 1.0 / r + r * b,
    })
}

/// (1/r² − B, 1/r² + B)
pub fn distortion_bounds(cp: &ClassParams, wp: &WrightParams, r: f64) -> Result<Envelope> {
    check_radius(r)?;
    let b = envelope_constant(cp, wp)?;
    let inv = 1.0 / (r * r);
    Ok(Envelope {
        lower: inv - b,
        upper: inv + b,
    })
}

/// Whether the envelopes are guaranteed for a given member.
///
/// Both envelopes only use the k = 1 bound, so they need every active
/// coefficient to be at least as constrained as a_1: weight(k) ≥ weight(1)
/// for growth and weight(k) ≥ k·weight(1) for distortion, over the k with
/// a_k > 0. Kernels with decreasing σ_k (α₁ = β₁ for instance) break this
/// for large k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeHypothesis {
    pub growth: bool,
    pub distortion: bool,
}

pub fn envelope_hypothesis(
    f: &MeroFunction,
    cp: &ClassParams,
    wp: &WrightParams,
) -> Result<EnvelopeHypothesis> {
    let w1 = coefficient_weight(cp, wp, 1)?;
    let mut out = EnvelopeHypothesis {
        growth: true,
        distortion: true,
    };
    for (k, a) in f.terms() {
        if a > 0.0 {
            let wk = coefficient_weight(cp, wp, k)?;
            out.growth &= wk >= w1;
            out.distortion &= wk >= k as f64 * w1;
        }
    }
    Ok(out)
}

/// Random member of V(α, η) with `len` coefficients.
///
/// Coefficients are drawn uniformly, roughly a third zeroed, then rescaled so
/// the weighted sum uses a random fraction in [0.5, 1) of 2η(1−α); one draw
/// in five is pushed to within 1e-12 of saturation.
pub fn random_member<R: Rng + ?Sized>(
    cp: &ClassParams,
    wp: &WrightParams,
    len: usize,
    rng: &mut R,
) -> Result<MeroFunction> {
    if len == 0 {
        return Ok(MeroFunction::principal());
    }
    let mut raw: Vec<f64> = (0..len)
        .map(|_| {
            if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen::<f64>()
            }
        })
        .collect();
    if raw.iter().all(|&a| a == 0.0) {
        let k = rng.gen_range(0..len);
        raw[k] = 1.0;
    }
    let mut weighted = 0.0;
    for (i, &a) in raw.iter().enumerate() {
        weighted += coefficient_weight(cp, wp, i + 1)? * a;
    }
    let fill = if rng.gen_bool(0.2) {
        1.0 - 1e-12
    } else {
        rng.gen_range(0.5..1.0)
    };
    let scale = fill * cp.rhs() / weighted;
    let f = MeroFunction::new(raw.into_iter().map(|a| a * scale).collect())?;
    debug_assert!(membership_margin(&f, cp, wp)? >= 0.0);
    Ok(f)
}
