//! Hadamard-product closure of V(α, η).
//!
//! For members f, g of V(α, η) the product f * g lies in V(α, δ) for every δ
//! at least the per-index order
//!
//! ```text
//! δ(k) = 2η²(1−α)(k+1) / [w_k·C(k) − 2η²(1−α)(k+2α−1)]
//! ```
//!
//! with w_k the coefficient weight and C(k) = k(1+η) + (1+η(2α−1)). δ(k) is
//! exactly the order at which the product of two k-th extremal functions
//! sits on the class boundary. The quadratic combination
//! 1/z + Σ (a²_{k,1} + a²_{k,2}) z^k has the same shape with 4η² in place of
//! 2η². When the denominator is not positive no order in (0, ∞) works for
//! that k and the aggregate is undefined.

use serde::{Deserialize, Serialize};

use crate::class_v::{coefficient_weight, membership_margin, ClassParams};
use crate::error::{Error, Result};
use crate::gamma_kernel::{ln_sigma_k, WrightParams};
use crate::mero_series::{BoundedMultiplier, MeroFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureKind {
    Convolution,
    QuadraticMean,
}

impl ClosureKind {
    fn factor(self) -> f64 {
        match self {
            ClosureKind::Convolution => 2.0,
            ClosureKind::QuadraticMean => 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureRow {
    pub k: usize,
    #[serde(with = "crate::nonfinite")]
    pub order: f64,
    pub denominator: f64,
    pub denominator_positive: bool,
    /// Order above 1, outside the admissible range of η.
    pub out_of_range: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Aggregate {
    Defined { value: f64 },
    Undefined { first_nonpositive_k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureOrder {
    pub kind: ClosureKind,
    pub k_max: usize,
    pub per_k: Vec<ClosureRow>,
    pub aggregate: Aggregate,
}

impl ClosureOrder {
    pub fn aggregate_value(&self) -> Option<f64> {
        match self.aggregate {
            Aggregate::Defined { value } => Some(value),
            Aggregate::Undefined { .. } => None,
        }
    }

    /// The class V(α, aggregate) when the aggregate is defined and in (0, 1].
    pub fn aggregate_class(&self, alpha: f64) -> Option<ClassParams> {
        self.aggregate_value()
            .and_then(|v| ClassParams::new(alpha, v).ok())
    }

    pub fn row(&self, k: usize) -> Option<&ClosureRow> {
        self.per_k.get(k.checked_sub(1)?)
    }
}

fn closure_order(
    kind: ClosureKind,
    cp: &ClassParams,
    wp: &WrightParams,
    k_max: usize,
) -> Result<ClosureOrder> {
    if k_max < 1 {
        return Err(Error::Domain("k_max must be ≥ 1".into()));
    }
    let (alpha, eta) = (cp.alpha(), cp.eta());
    let scale = kind.factor() * eta * eta * (1.0 - alpha);
    let mut per_k = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let kf = k as f64;
        let c = cp.bracket(k);
        // w_k·C(k) = k σ_k C(k)²; formed in log space so tiny σ_k reads as 0
        let weighted = (ln_sigma_k(wp, k)? + (kf * c * c).ln()).exp();
        let denominator = weighted - scale * (kf + 2.0 * alpha - 1.0);
        let order = scale * (kf + 1.0) / denominator;
        let denominator_positive = denominator > 0.0;
        per_k.push(ClosureRow {
            k,
            order,
            denominator,
            denominator_positive,
            out_of_range: denominator_positive && order > 1.0,
        });
    }
    let aggregate = match per_k.iter().find(|row| !row.denominator_positive) {
        Some(row) => Aggregate::Undefined {
            first_nonpositive_k: row.k,
        },
        None => Aggregate::Defined {
            value: per_k
                .iter()
                .map(|row| row.order)
                .fold(f64::NEG_INFINITY, f64::max),
        },
    };
    Ok(ClosureOrder {
        kind,
        k_max,
        per_k,
        aggregate,
    })
}

/// Per-index orders δ(k) for f * g and their maximum over k ≤ k_max.
pub fn convolution_order(
    cp: &ClassParams,
    wp: &WrightParams,
    k_max: usize,
) -> Result<ClosureOrder> {
    closure_order(ClosureKind::Convolution, cp, wp, k_max)
}

/// Per-index orders β(k) for the quadratic combination.
pub fn quadratic_mean_order(
    cp: &ClassParams,
    wp: &WrightParams,
    k_max: usize,
) -> Result<ClosureOrder> {
    closure_order(ClosureKind::QuadraticMean, cp, wp, k_max)
}

/// 1/z + Σ (a²_{k,1} + a²_{k,2}) z^k
pub fn quadratic_combination(f1: &MeroFunction, f2: &MeroFunction) -> Result<MeroFunction> {
    f1.require_nonnegative()?;
    f2.require_nonnegative()?;
    let len = f1.len().max(f2.len());
    MeroFunction::new(
        (1..=len)
            .map(|k| {
                let (a, b) = (f1.coeff(k), f2.coeff(k));
                a * a + b * b
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedConvolution {
    pub product: MeroFunction,
    pub margin_before: f64,
    /// 2η(1−α) − Σ w_k a_k |b_k|
    pub margin: f64,
}

/// f * g for a member f and a multiplier with |b_k| ≤ 1. The margin of the
/// product never drops below the margin of f.
pub fn bounded_multiplier_convolve(
    f: &MeroFunction,
    g: &BoundedMultiplier,
    cp: &ClassParams,
    wp: &WrightParams,
) -> Result<BoundedConvolution> {
    let margin_before = membership_margin(f, cp, wp)?;
    if !cp.accepts_margin(margin_before) {
        return Err(Error::ClassPrecondition(format!(
            "f is not a member (margin {margin_before})"
        )));
    }
    let mut weighted = 0.0;
    let mut coeffs = Vec::with_capacity(f.len().min(g.coeffs().len()));
    for ((k, a), &b) in f.terms().zip(g.coeffs()) {
        coeffs.push(a * b);
        if a != 0.0 && b != 0.0 {
            weighted += coefficient_weight(cp, wp, k)? * a * b.abs();
        }
    }
    Ok(BoundedConvolution {
        product: MeroFunction::new(coeffs)?,
        margin_before,
        margin: cp.rhs() - weighted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class_v::{extremal_function, margin_at_order, random_member};
    use crate::mero_series::hadamard;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half_one() -> ClassParams {
        ClassParams::new(0.5, 1.0).unwrap()
    }

    fn five_one() -> WrightParams {
        WrightParams::hypergeometric(&[5.0], &[1.0]).unwrap()
    }

    fn unit() -> WrightParams {
        WrightParams::hypergeometric(&[1.0], &[1.0]).unwrap()
    }

    #[test]
    fn convolution_order_examples() {
        let cp = half_one();
        let d = convolution_order(&cp, &five_one(), 1).unwrap();
        // σ_1 = 7.5, C(1) = 3: 2 / (67.5 − 1)
        assert!((d.per_k[0].order - 2.0 / 66.5).abs() < 1e-14);
        assert_eq!(
            d.aggregate_value().map(|v| (v - 2.0 / 66.5).abs() < 1e-14),
            Some(true)
        );

        let d = convolution_order(&cp, &unit(), 64).unwrap();
        assert!((d.per_k[0].denominator - 3.5).abs() < 1e-13);
        assert!((d.per_k[0].order - 4.0 / 7.0).abs() < 1e-14);
        assert!(matches!(d.aggregate, Aggregate::Undefined { .. }));
        assert!(d.per_k.iter().any(|row| !row.denominator_positive));
    }

    #[test]
    fn quadratic_order_examples() {
        let cp = half_one();
        let b = quadratic_mean_order(&cp, &five_one(), 1).unwrap();
        assert!((b.per_k[0].order - 4.0 / 65.5).abs() < 1e-14);
        assert!(!b.per_k[0].out_of_range);
        let b = quadratic_mean_order(&cp, &unit(), 1).unwrap();
        assert!((b.per_k[0].order - 1.6).abs() < 1e-13);
        assert!(b.per_k[0].out_of_range);
        assert!(b.aggregate_class(0.5).is_none());
    }

    #[test]
    fn k_max_must_be_positive() {
        assert!(matches!(
            convolution_order(&half_one(), &unit(), 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn first_nonpositive_index_for_five_one() {
        // k σ_k C(k)² against k for σ_k = (k+5)!/(24 (k+1)!²): positive up to k = 7
        let d = convolution_order(&half_one(), &five_one(), 10).unwrap();
        assert_eq!(
            d.aggregate,
            Aggregate::Undefined {
                first_nonpositive_k: 8
            }
        );
        assert!(convolution_order(&half_one(), &five_one(), 7)
            .unwrap()
            .aggregate_value()
            .is_some());
    }

    #[test]
    fn boundary_pairs_define_the_orders() {
        let (cp, wp) = (half_one(), five_one());
        let d = convolution_order(&cp, &wp, 10).unwrap();
        let b = quadratic_mean_order(&cp, &wp, 10).unwrap();
        for k in 1..=10 {
            let f = extremal_function(&cp, &wp, k).unwrap();
            let prod = hadamard(&f, &f);
            let m = margin_at_order(&prod, cp.alpha(), d.per_k[k - 1].order, &wp).unwrap();
            assert!(m.abs() < 1e-10, "k={k}: δ margin {m}");
            let quad = quadratic_combination(&f, &f).unwrap();
            let m = margin_at_order(&quad, cp.alpha(), b.per_k[k - 1].order, &wp).unwrap();
            assert!(m.abs() < 1e-10, "k={k}: β margin {m}");
        }
    }

    #[test]
    fn quadratic_combination_examples() {
        let p = MeroFunction::principal();
        assert!(quadratic_combination(&p, &p).unwrap().is_empty());
        let f = MeroFunction::new(vec![3.0]).unwrap();
        let g = MeroFunction::new(vec![4.0]).unwrap();
        assert_eq!(quadratic_combination(&f, &g).unwrap().coeffs(), &[25.0]);
        let f = MeroFunction::new(vec![1.0, 2.0]).unwrap();
        let g = MeroFunction::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(quadratic_combination(&f, &g).unwrap().coeffs(), &[1.0, 5.0]);
        let neg = MeroFunction::new(vec![-1.0]).unwrap();
        assert!(matches!(
            quadratic_combination(&neg, &g),
            Err(Error::ClassPrecondition(_))
        ));
    }

    #[test]
    fn random_pairs_close_at_aggregate_order() {
        let (cp, wp) = (half_one(), five_one());
        let d = convolution_order(&cp, &wp, 7)
            .unwrap()
            .aggregate_value()
            .unwrap();
        let b = quadratic_mean_order(&cp, &wp, 7)
            .unwrap()
            .aggregate_value()
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let f = random_member(&cp, &wp, 7, &mut rng).unwrap();
            let g = random_member(&cp, &wp, 7, &mut rng).unwrap();
            assert!(margin_at_order(&hadamard(&f, &g), 0.5, d, &wp).unwrap() >= -1e-10);
            let q = quadratic_combination(&f, &g).unwrap();
            assert!(margin_at_order(&q, 0.5, b, &wp).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn bounded_multiplier_examples() {
        let (cp, wp) = (half_one(), unit());
        let f = MeroFunction::new(vec![0.2, 0.1]).unwrap();
        let before = membership_margin(&f, &cp, &wp).unwrap();

        let ones = BoundedMultiplier::new(vec![1.0, 1.0]).unwrap();
        let out = bounded_multiplier_convolve(&f, &ones, &cp, &wp).unwrap();
        assert_eq!(out.product, f);
        assert_eq!(out.margin, before);

        let zeros = BoundedMultiplier::new(vec![0.0, 0.0]).unwrap();
        let out = bounded_multiplier_convolve(&f, &zeros, &cp, &wp).unwrap();
        assert!(out.product.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(out.margin, cp.rhs());

        let edge = MeroFunction::new(vec![2.0 / 3.0]).unwrap();
        let half = BoundedMultiplier::new(vec![0.5]).unwrap();
        let out = bounded_multiplier_convolve(&edge, &half, &cp, &wp).unwrap();
        assert!(out.margin_before.abs() < 1e-14);
        assert!((out.margin - 0.5).abs() < 1e-14);

        let outsider = MeroFunction::new(vec![1.0]).unwrap();
        assert!(matches!(
            bounded_multiplier_convolve(&outsider, &half, &cp, &wp),
            Err(Error::ClassPrecondition(_))
        ));
    }

    proptest! {
        #[test]
        fn bounded_multiplier_never_lowers_margin(
            seed in any::<u64>(),
            b in prop::collection::vec(-1.0f64..=1.0, 0..10),
            len in 0usize..10,
        ) {
            let (cp, wp) = (ClassParams::new(0.3, 0.7).unwrap(), WrightParams::hypergeometric(&[2.0], &[1.5]).unwrap());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_member(&cp, &wp, len, &mut rng).unwrap();
            let g = BoundedMultiplier::new(b).unwrap();
            let out = bounded_multiplier_convolve(&f, &g, &cp, &wp).unwrap();
            prop_assert!(out.margin >= out.margin_before);
        }
    }
}
