//! Sampled verification of the analytic class condition and of the theorem
//! conclusions on circles inside the punctured disk.
//!
//! Samples are visited in (radius, angle index) order and the worst sample
//! is the first one reaching the extreme value, so reports are deterministic.
//! Singular samples evaluate to +∞ and are reported, never thrown.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::class_v::{
    distortion_bounds, envelope_hypothesis, growth_bounds, membership_margin, ClassParams, Envelope,
};
use crate::error::{Error, Result};
use crate::gamma_kernel::WrightParams;
use crate::mero_series::{apply_operator, MeroFunction};
use crate::radii::RadiusCondition;

pub const DEFAULT_RADII: [f64; 4] = [0.5, 0.9, 0.99, 0.999];
pub const DEFAULT_ANGLES: usize = 720;
pub const RAMP_RADII: [f64; 3] = [1.0 - 1e-2, 1.0 - 1e-3, 1.0 - 1e-4];
/// Absolute slack for the envelope checks.
pub const ENVELOPE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlan")]
pub struct SamplingPlan {
    radii: Vec<f64>,
    angles: usize,
    include_real_axis_ramp: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    #[serde(default = "default_radii")]
    radii: Vec<f64>,
    #[serde(default = "default_angles")]
    angles: usize,
    #[serde(default = "default_ramp")]
    include_real_axis_ramp: bool,
}

fn default_radii() -> Vec<f64> {
    DEFAULT_RADII.to_vec()
}

fn default_angles() -> usize {
    DEFAULT_ANGLES
}

fn default_ramp() -> bool {
    true
}

impl TryFrom<RawPlan> for SamplingPlan {
    type Error = Error;

    fn try_from(raw: RawPlan) -> Result<Self> {
        SamplingPlan::new(raw.radii, raw.angles, raw.include_real_axis_ramp)
    }
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            angles: DEFAULT_ANGLES,
            include_real_axis_ramp: true,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct SamplePoint {
    z: Complex64,
    radius: f64,
    angle_index: usize,
}

impl SamplingPlan {
    pub fn new(radii: Vec<f64>, angles: usize, include_real_axis_ramp: bool) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidParameter(
                "sampling plan needs at least one radius".into(),
            ));
        }
        if let Some(r) = radii.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "plan radius {r} is outside (0, 1)"
            )));
        }
        if angles < 8 {
            return Err(Error::InvalidParameter(format!(
                "plan needs at least 8 angles, got {angles}"
            )));
        }
        Ok(Self {
            radii,
            angles,
            include_real_axis_ramp,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles(&self) -> usize {
        self.angles
    }

    pub fn include_real_axis_ramp(&self) -> bool {
        self.include_real_axis_ramp
    }

    pub fn with_angles(&self, angles: usize) -> Result<Self> {
        Self::new(self.radii.clone(), angles, self.include_real_axis_ramp)
    }

    fn circle(&self, r: f64) -> impl Iterator<Item = SamplePoint> + '_ {
        (0..self.angles).map(move |j| SamplePoint {
            z: Complex64::from_polar(r, j as f64 * TAU / self.angles as f64),
            radius: r,
            angle_index: j,
        })
    }

    /// Circle samples plus ramp points (angle index 0), sorted by
    /// (radius, angle index).
    fn points(&self) -> Vec<SamplePoint> {
        let mut pts: Vec<SamplePoint> = self.radii.iter().flat_map(|&r| self.circle(r)).collect();
        if self.include_real_axis_ramp {
            for &r in &RAMP_RADII {
                pts.push(SamplePoint {
                    z: Complex64::new(r, 0.0),
                    radius: r,
                    angle_index: 0,
                });
            }
        }
        pts.sort_by(|a, b| {
            a.radius
                .total_cmp(&b.radius)
                .then(a.angle_index.cmp(&b.angle_index))
        });
        pts.dedup_by(|a, b| a.radius == b.radius && a.angle_index == b.angle_index);
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
    pub angle_index: usize,
    #[serde(with = "crate::nonfinite")]
    pub observed: f64,
    /// The bound the observation was compared against (the nearer one for
    /// two-sided checks).
    #[serde(with = "crate::nonfinite")]
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub pass: bool,
    #[serde(with = "crate::nonfinite")]
    pub margin: f64,
    pub worst_sample: Option<Sample>,
    pub samples: usize,
    /// Whether the theorem being checked applies to this input; `None` when
    /// the check has no hypothesis beyond validity.
    pub hypothesis_holds: Option<bool>,
    pub plan: SamplingPlan,
    pub class: Option<ClassParams>,
    pub wright: Option<WrightParams>,
    pub coeffs: Vec<f64>,
}

fn check_point(z: Complex64) -> Result<()> {
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Pole);
    }
    if !(r < 1.0) {
        return Err(Error::Domain(format!(
            "|z| = {r} is not inside the unit disk"
        )));
    }
    Ok(())
}

/// |q + 2| / |q + 2α| with q = zF″/F′ for an already transformed F.
///
/// Evaluated as |N| / |N + 2(α−1)F′| with N = zF″ + 2F′ = Σ k(k+1) b_k z^{k−1},
/// so the principal part cancels exactly.
fn ratio_of_image(image: &MeroFunction, alpha: f64, z: Complex64) -> f64 {
    let d1 = image.evaluate_d1_unchecked(z);
    if d1.norm() == 0.0 {
        return f64::INFINITY;
    }
    let mut n = Complex64::new(0.0, 0.0);
    let mut zp = Complex64::new(1.0, 0.0);
    for (k, b) in image.terms() {
        let kf = k as f64;
        n += zp * (kf * (kf + 1.0) * b);
        zp *= z;
    }
    let den = (n + d1 * (2.0 * (alpha - 1.0))).norm();
    if den == 0.0 {
        return f64::INFINITY;
    }
    let v = n.norm() / den;
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// The modulus in the defining condition of V(α, η) at one point, +∞ at a
/// singular sample.
pub fn condition_ratio(
    f: &MeroFunction,
    cp: &ClassParams,
    wp: &WrightParams,
    z: Complex64,
) -> Result<f64> {
    check_point(z)?;
    let image = apply_operator(wp, f)?;
    Ok(ratio_of_image(&image, cp.alpha(), z))
}

/// First sample with the largest value of `eval`.
fn worst_max(
    points: &[SamplePoint],
    mut eval: impl FnMut(&SamplePoint) -> f64,
) -> (SamplePoint, f64) {
    let mut best = (points[0], f64::NEG_INFINITY);
    for p in points {
        let v = eval(p);
        if v > best.1 {
            best = (*p, v);
        }
    }
    best
}

fn sample(p: &SamplePoint, observed: f64, bound: f64) -> Sample {
    Sample {
        re: p.z.re,
        im: p.z.im,
        radius: p.radius,
        angle_index: p.angle_index,
        observed,
        bound,
    }
}

/// Pass iff the sampled maximum of the condition ratio is strictly below η.
pub fn verify_membership_analytic(
    f: &MeroFunction,
    cp: &ClassParams,
    wp: &WrightParams,
    plan: &SamplingPlan,
) -> Result<VerificationReport> {
    let image = apply_operator(wp, f)?;
    let points = plan.points();
    let (p, worst) = worst_max(&points, |p| ratio_of_image(&image, cp.alpha(), p.z));
    let margin = cp.eta() - worst;
    Ok(VerificationReport {
        check_name: "membership_analytic".into(),
        pass: worst < cp.eta(),
        margin,
        worst_sample: Some(sample(&p, worst, cp.eta())),
        samples: points.len(),
        hypothesis_holds: None,
        plan: plan.clone(),
        class: Some(*cp),
        wright: Some(wp.clone()),
        coeffs: f.coeffs().to_vec(),
    })
}

#[allow(clippy::too_many_arguments)]
fn verify_envelope(
    name: &str,
    f: &MeroFunction,
    cp: &ClassParams,
    wp: &WrightParams,
    plan: &SamplingPlan,
    hypothesis: bool,
    bounds: impl Fn(f64) -> Result<Envelope>,
    observe: impl Fn(Complex64) -> f64,
) -> Result<VerificationReport> {
    let points = plan.points();
    let mut envelopes: Vec<(f64, Envelope)> = Vec::new();
    for p in &points {
        if envelopes.last().is_none_or(|(r, _)| *r != p.radius) {
            envelopes.push((p.radius, bounds(p.radius)?));
        }
    }
    let envelope_at = |r: f64| {
        envelopes
            .iter()
            .find(|(er, _)| *er == r)
            .map(|(_, e)| *e)
            .unwrap()
    };

    let mut worst: Option<Sample> = None;
    let mut margin = f64::INFINITY;
    for p in &points {
        let e = envelope_at(p.radius);
        let obs = observe(p.z);
        let upper_gap = e.upper - obs;
        // a negative lower bound says nothing about a modulus
        let lower_gap = if e.lower < 0.0 {
            f64::INFINITY
        } else {
            obs - e.lower
        };
        let (gap, bound) = if lower_gap < upper_gap {
            (lower_gap, e.lower)
        } else {
            (upper_gap, e.upper)
        };
        let gap = if gap.is_nan() { f64::NEG_INFINITY } else { gap };
        if worst.is_none() || gap < margin {
            margin = gap;
            worst = Some(sample(p, obs, bound));
        }
    }
    Ok(VerificationReport {
        check_name: name.into(),
        pass: margin >= -ENVELOPE_SLACK,
        margin,
        worst_sample: worst,
        samples: points.len(),
        hypothesis_holds: Some(hypothesis),
        plan: plan.clone(),
        class: Some(*cp),
        wright: Some(wp.clone()),
        coeffs: f.coeffs().to_vec(),
    })
}

fn is_member(f: &MeroFunction, cp: &ClassParams, wp: &WrightParams) -> Result<bool> {
    if !f.is_nonnegative() {
        return Ok(false);
    }
    Ok(cp.accepts_margin(membership_margin(f, cp, wp)?))
}

/// |f(z)| against the growth envelope on every sampled circle.
pub fn verify_growth(
    f: &MeroFunction,
    cp: &ClassParams,
    wp: &WrightParams,
    plan: &SamplingPlan,
) -> Result<VerificationReport> {
    let hyp = is_member(f, cp, wp)? && envelope_hypothesis(f, cp, wp)?.growth;
    verify_envelope(
        "growth",
        f,
        cp,
        wp,
        plan,
        hyp,
        |r| growth_bounds(cp, wp, r),
        |z| f.evaluate_unchecked(z).norm(),
    )
}

/// |f′(z)| against the distortion envelope on every sampled circle.
pub fn verify_distortion(
    f: &MeroFunction,
    cp: &ClassParams,
    wp: &WrightParams,
    plan: &SamplingPlan,
) -> Result<VerificationReport> {
    let hyp = is_member(f, cp, wp)? && envelope_hypothesis(f, cp, wp)?.distortion;
    verify_envelope(
        "distortion",
        f,
        cp,
        wp,
        plan,
        hyp,
        |r| distortion_bounds(cp, wp, r),
        |z| f.evaluate_d1_unchecked(z).norm(),
    )
}

/// Checks the starlike or convex condition on the circles at 0.5 and 0.99
/// times the claimed radius, using the plan's angle count.
pub fn verify_radius(
    f: &MeroFunction,
    condition: RadiusCondition,
    claimed_radius: f64,
    plan: &SamplingPlan,
) -> Result<VerificationReport> {
    condition.validate()?;
    if !(claimed_radius > 0.0 && claimed_radius <= 1.0) {
        return Err(Error::Domain(format!(
            "claimed radius must lie in (0, 1], got {claimed_radius}"
        )));
    }
    let circles = SamplingPlan::new(
        vec![0.5 * claimed_radius, 0.99 * claimed_radius],
        plan.angles(),
        false,
    )?;
    let points = circles.points();
    let bound = condition.bound();
    let (p, worst) = worst_max(&points, |p| condition.value(f, p.z));
    Ok(VerificationReport {
        check_name: match condition {
            RadiusCondition::Starlike { .. } => "radius_starlike".into(),
            RadiusCondition::Convex { .. } => "radius_convex".into(),
        },
        pass: worst <= bound,
        margin: bound - worst,
        worst_sample: Some(sample(&p, worst, bound)),
        samples: points.len(),
        hypothesis_holds: None,
        plan: circles,
        class: None,
        wright: None,
        coeffs: f.coeffs().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class_v::{coefficient_bound, extremal_function, random_member};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn half_one() -> ClassParams {
        ClassParams::new(0.5, 1.0).unwrap()
    }

    fn unit() -> WrightParams {
        WrightParams::hypergeometric(&[1.0], &[1.0]).unwrap()
    }

    /// Closed form of the ratio for f = 1/z + a z^k, with b = σ_k a and
    /// w = z^{k+1}: k(k+1)|b w| / |2(1−α) + k(k−1+2α) b w|.
    fn one_term_ratio(k: usize, b: f64, alpha: f64, z: Complex64) -> f64 {
        let kf = k as f64;
        let w = z.powu(k as u32 + 1);
        kf * (kf + 1.0) * (b * w).norm()
            / (2.0 * (1.0 - alpha) + kf * (kf - 1.0 + 2.0 * alpha) * b * w).norm()
    }

    #[test]
    fn plan_validation() {
        assert!(SamplingPlan::new(vec![0.5], 7, false).is_err());
        assert!(SamplingPlan::new(vec![1.0], 8, false).is_err());
        assert!(SamplingPlan::new(vec![], 8, false).is_err());
        let p: SamplingPlan = serde_json::from_str("{}").unwrap();
        assert_eq!(p, SamplingPlan::default());
        assert!(serde_json::from_str::<SamplingPlan>(r#"{"angle": 10}"#).is_err());
        assert!(serde_json::from_str::<SamplingPlan>(r#"{"radii": [0.5, 1.2]}"#).is_err());
        // 0.99 and 0.999 are both circle radii and ramp points
        assert_eq!(SamplingPlan::default().points().len(), 4 * 720 + 1);
    }

    #[test]
    fn ratio_examples() {
        let (cp, wp) = (half_one(), unit());
        let p = MeroFunction::principal();
        for z in [Complex64::new(0.3, 0.1), Complex64::new(-0.9, 0.0)] {
            assert_eq!(condition_ratio(&p, &cp, &wp, z).unwrap(), 0.0);
        }
        assert!(condition_ratio(&p, &cp, &wp, Complex64::new(0.0, 0.0)).is_err());
        assert!(condition_ratio(&p, &cp, &wp, Complex64::new(1.0, 0.0)).is_err());

        // extremal k = 1: a₁ = 2/3, b = 1/3. Real axis tends to
        // (k+1)η/(k+1+2η(k+2α−1)) = 0.5; the imaginary axis tends to η.
        let f = MeroFunction::new(vec![2.0 / 3.0]).unwrap();
        let r = 1.0 - 1e-9;
        let real = condition_ratio(&f, &cp, &wp, Complex64::new(r, 0.0)).unwrap();
        assert!((real - 0.5).abs() < 1e-8);
        let imag = condition_ratio(&f, &cp, &wp, Complex64::new(0.0, r)).unwrap();
        assert!(imag < 1.0 && (imag - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ratio_matches_one_term_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let cp =
                ClassParams::new(rng.gen_range(0.01..0.99), rng.gen_range(0.01..=1.0)).unwrap();
            let wp = WrightParams::hypergeometric(
                &[rng.gen_range(0.5..4.0)],
                &[rng.gen_range(0.5..4.0)],
            )
            .unwrap();
            let k = rng.gen_range(1..=6);
            let a = coefficient_bound(&cp, &wp, k).unwrap() * rng.gen_range(0.1..2.0);
            let f = MeroFunction::single_term(k, a).unwrap();
            let z = Complex64::from_polar(rng.gen_range(0.05..0.999), rng.gen_range(0.0..TAU));
            let b = crate::gamma_kernel::sigma_k(&wp, k).unwrap() * a;
            let want = one_term_ratio(k, b, cp.alpha(), z);
            let got = condition_ratio(&f, &cp, &wp, z).unwrap();
            assert!(
                (got - want).abs() <= 1e-10 * want.max(1.0),
                "{got} vs {want}"
            );
            assert_eq!(got, condition_ratio(&f, &cp, &wp, z.conj()).unwrap());
        }
    }

    #[test]
    fn singular_sample_is_infinite() {
        // F = 1/z + 4z has F′(±0.5) = 0 exactly
        let image = MeroFunction::new(vec![4.0]).unwrap();
        assert_eq!(
            ratio_of_image(&image, 0.5, Complex64::new(0.5, 0.0)),
            f64::INFINITY
        );
        assert!(ratio_of_image(&image, 0.5, Complex64::new(0.4, 0.0)).is_finite());
        // a₁ = 8 puts that zero of F′ on the first plan circle
        let f = MeroFunction::new(vec![8.0]).unwrap();
        let rep =
            verify_membership_analytic(&f, &half_one(), &unit(), &SamplingPlan::default()).unwrap();
        assert!(!rep.pass && rep.margin < 0.0);
    }

    #[test]
    fn membership_examples() {
        let (cp, wp, plan) = (half_one(), unit(), SamplingPlan::default());
        let rep = verify_membership_analytic(&MeroFunction::principal(), &cp, &wp, &plan).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.margin, 1.0);

        for k in 1..=4 {
            let f = extremal_function(&cp, &wp, k).unwrap();
            assert!(
                verify_membership_analytic(&f, &cp, &wp, &plan)
                    .unwrap()
                    .pass,
                "k={k}"
            );
            let over = MeroFunction::single_term(k, 1.1 * coefficient_bound(&cp, &wp, k).unwrap())
                .unwrap();
            let rep = verify_membership_analytic(&over, &cp, &wp, &plan).unwrap();
            assert!(!rep.pass, "k={k}");
            // the violation is off the real axis
            assert_eq!(rep.worst_sample.unwrap().radius, 0.999);
        }
    }

    #[test]
    fn random_members_pass_analytic_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let plan = SamplingPlan::new(DEFAULT_RADII.to_vec(), 180, true).unwrap();
        for _ in 0..60 {
            let cp =
                ClassParams::new(rng.gen_range(0.01..0.99), rng.gen_range(0.01..=1.0)).unwrap();
            let wp = WrightParams::hypergeometric(
                &[rng.gen_range(0.5..4.0)],
                &[rng.gen_range(0.5..4.0)],
            )
            .unwrap();
            let f = random_member(&cp, &wp, rng.gen_range(1..12), &mut rng).unwrap();
            let rep = verify_membership_analytic(&f, &cp, &wp, &plan).unwrap();
            assert!(rep.pass && rep.margin > 0.0, "{rep:?}");
        }
    }

    #[test]
    fn growth_examples() {
        let (cp, wp) = (half_one(), unit());
        let plan = SamplingPlan::new(vec![0.5], 720, false).unwrap();
        let rep = verify_growth(&MeroFunction::principal(), &cp, &wp, &plan).unwrap();
        assert!(rep.pass);
        assert!((rep.margin - 1.0 / 3.0).abs() < 1e-14);

        let f = extremal_function(&cp, &wp, 1).unwrap();
        let rep = verify_growth(&f, &cp, &wp, &plan).unwrap();
        assert!(rep.pass && rep.hypothesis_holds == Some(true));
        assert!(rep.margin.abs() < 1e-12);
        let w = rep.worst_sample.unwrap();
        assert_eq!((w.re, w.im), (0.5, 0.0));

        let d = verify_distortion(&f, &cp, &wp, &plan).unwrap();
        assert!(d.pass && d.margin.abs() < 1e-12);

        let non = MeroFunction::new(vec![4.0 / 3.0]).unwrap();
        let rep = verify_growth(&non, &cp, &wp, &plan).unwrap();
        assert_eq!(rep.hypothesis_holds, Some(false));
    }

    #[test]
    fn negative_lower_bound_is_vacuous() {
        // B = 2 for a tiny σ₁; 1/r − rB < 0 at r = 0.9
        let wp = WrightParams::hypergeometric(&[0.25], &[1.0]).unwrap();
        let cp = ClassParams::new(0.5, 1.0).unwrap();
        assert!(growth_bounds(&cp, &wp, 0.9).unwrap().lower < 0.0);
        let f = extremal_function(&cp, &wp, 1).unwrap();
        let plan = SamplingPlan::new(vec![0.9], 64, false).unwrap();
        assert!(verify_growth(&f, &cp, &wp, &plan).unwrap().pass);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn radius_examples() {
        let plan = SamplingPlan::default();
        let f = MeroFunction::new(vec![2.0 / 3.0]).unwrap();
        let star = RadiusCondition::Starlike { order: 0.0 };
        assert!(verify_radius(&f, star, 0.70711, &plan).unwrap().pass);
        let rep = verify_radius(&f, star, 0.9, &plan).unwrap();
        assert!(!rep.pass);
        // zf′/f + 1 = 2a r² w/(1 + a w) peaks where w = z² = −r²
        let w = rep.worst_sample.unwrap();
        assert_eq!(w.angle_index, 180);
        assert!(
            (w.observed
                - 2.0 * (2.0 / 3.0) * 0.891_f64.powi(2) / (1.0 - (2.0 / 3.0) * 0.891_f64.powi(2)))
            .abs()
                < 1e-12
        );
        assert!(
            verify_radius(&MeroFunction::principal(), star, 1.0, &plan)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn reports_are_deterministic() {
        let (cp, wp, plan) = (half_one(), unit(), SamplingPlan::default());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_member(&cp, &wp, 8, &mut rng).unwrap();
        let a = verify_membership_analytic(&f, &cp, &wp, &plan).unwrap();
        let b = verify_membership_analytic(&f, &cp, &wp, &plan).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn real_axis_necessity_follows_one_term_crossing() {
        // with a = (1+ε)·bound, the real-axis limit exceeds η iff
        // ε(k+1) > η(k+2α−1)(2+ε)
        let wp = unit();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut seen = [false; 2];
        for _ in 0..300 {
            let cp =
                ClassParams::new(rng.gen_range(0.01..0.99), rng.gen_range(0.01..=1.0)).unwrap();
            let (alpha, eta) = (cp.alpha(), cp.eta());
            for k in 1..=3 {
                for eps in [0.05, 0.1, 0.5] {
                    let kf = k as f64;
                    let gap = eps * (kf + 1.0) - eta * (kf + 2.0 * alpha - 1.0) * (2.0 + eps);
                    if gap.abs() < 1e-2 {
                        continue;
                    }
                    let f = MeroFunction::single_term(
                        k,
                        (1.0 + eps) * coefficient_bound(&cp, &wp, k).unwrap(),
                    )
                    .unwrap();
                    let ramp: Vec<f64> = RAMP_RADII
                        .iter()
                        .map(|&r| condition_ratio(&f, &cp, &wp, Complex64::new(r, 0.0)).unwrap())
                        .collect();
                    assert!(ramp.windows(2).all(|w| w[1] > w[0]));
                    assert_eq!(ramp[2] > eta, gap > 0.0, "k={k} ε={eps} α={alpha} η={eta}");
                    seen[(gap > 0.0) as usize] = true;
                    // along z^{k+1} = −r^{k+1} the excess always shows
                    let z = Complex64::from_polar(RAMP_RADII[2], std::f64::consts::PI / (kf + 1.0));
                    assert!(condition_ratio(&f, &cp, &wp, z).unwrap() > eta);
                }
            }
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn members_have_no_singular_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let plan = SamplingPlan::default();
        for _ in 0..100 {
            let cp =
                ClassParams::new(rng.gen_range(0.01..0.99), rng.gen_range(0.01..=1.0)).unwrap();
            let wp = WrightParams::hypergeometric(
                &[rng.gen_range(0.5..4.0)],
                &[rng.gen_range(0.5..4.0)],
            )
            .unwrap();
            let f = random_member(&cp, &wp, rng.gen_range(1..10), &mut rng).unwrap();
            let image = apply_operator(&wp, &f).unwrap();
            for p in plan.points() {
                assert!(image.evaluate_d1_unchecked(p.z).norm() > 0.0);
                assert!(ratio_of_image(&image, cp.alpha(), p.z).is_finite());
            }
        }
    }
}
