//! Truncated meromorphic functions f(z) = 1/z + Σ_{k=1}^{K} a_k z^k.
//!
//! The principal part 1/z is implicit. All sums are finite and run in
//! ascending k.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma_kernel::{sigma_k, WrightParams};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MeroFunction {
    coeffs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for MeroFunction {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        MeroFunction::new(coeffs)
    }
}

impl From<MeroFunction> for Vec<f64> {
    fn from(f: MeroFunction) -> Self {
        f.coeffs
    }
}

impl MeroFunction {
    /// `coeffs[i]` is a_{i+1}.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coefficient a_{} is not finite",
                bad + 1
            )));
        }
        Ok(Self { coeffs })
    }

    /// f(z) = 1/z
    pub fn principal() -> Self {
        Self::default()
    }

    /// 1/z + a·z^k
    pub fn single_term(k: usize, a: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("term index must be ≥ 1".into()));
        }
        let mut coeffs = vec![0.0; k];
        coeffs[k - 1] = a;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation length K.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// a_k, zero beyond the truncation.
    pub fn coeff(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.coeffs.get(k - 1).copied().unwrap_or(0.0)
    }

    /// (k, a_k) pairs for k = 1..=K.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &a)| (i + 1, a))
    }

    /// Membership in Σ_q: every a_k ≥ 0.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|&a| a >= 0.0)
    }

    pub(crate) fn require_nonnegative(&self) -> Result<()> {
        match self.coeffs.iter().position(|&a| a < 0.0) {
            Some(i) => Err(Error::ClassPrecondition(format!(
                "coefficient a_{} = {} is negative",
                i + 1,
                self.coeffs[i]
            ))),
            None => Ok(()),
        }
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        check_point(z)?;
        Ok(self.evaluate_unchecked(z))
    }

    pub fn evaluate_d1(&self, z: Complex64) -> Result<Complex64> {
        check_point(z)?;
        Ok(self.evaluate_d1_unchecked(z))
    }

    pub fn evaluate_d2(&self, z: Complex64) -> Result<Complex64> {
        check_point(z)?;
        Ok(self.evaluate_d2_unchecked(z))
    }

    /// 1/z + Σ a_k z^k
    pub(crate) fn evaluate_unchecked(&self, z: Complex64) -> Complex64 {
        let mut acc = z.inv();
        let mut power = z;
        for &a in &self.coeffs {
            acc += power * a;
            power *= z;
        }
        acc
    }

    /// −1/z² + Σ k a_k z^{k−1}
    pub(crate) fn evaluate_d1_unchecked(&self, z: Complex64) -> Complex64 {
        let mut acc = -(z * z).inv();
        let mut power = Complex64::new(1.0, 0.0);
        for (k, a) in self.terms() {
            acc += power * (k as f64 * a);
            power *= z;
        }
        acc
    }

    /// 2/z³ + Σ k(k−1) a_k z^{k−2}
    pub(crate) fn evaluate_d2_unchecked(&self, z: Complex64) -> Complex64 {
        let mut acc = (z * z * z).inv() * 2.0;
        let mut power = Complex64::new(1.0, 0.0);
        for (k, a) in self.terms().skip(1) {
            acc += power * ((k * (k - 1)) as f64 * a);
            power *= z;
        }
        acc
    }
}

fn check_point(z: Complex64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Pole);
    }
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::Domain(format!(
            "point outside the punctured unit disk (|z| = {r})"
        )));
    }
    Ok(())
}

/// Multiplier sequence b_1..b_K with every |b_k| ≤ 1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BoundedMultiplier {
    coeffs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for BoundedMultiplier {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        BoundedMultiplier::new(coeffs)
    }
}

impl From<BoundedMultiplier> for Vec<f64> {
    fn from(g: BoundedMultiplier) -> Self {
        g.coeffs
    }
}

impl BoundedMultiplier {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|b| !(b.abs() <= 1.0)) {
            return Err(Error::ClassPrecondition(format!(
                "multiplier coefficient b_{} = {} has modulus above 1",
                i + 1,
                coeffs[i]
            )));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_function(&self) -> MeroFunction {
        MeroFunction {
            coeffs: self.coeffs.clone(),
        }
    }
}

/// f * g = 1/z + Σ a_k b_k z^k, truncated at min(K_f, K_g).
pub fn hadamard(f: &MeroFunction, g: &MeroFunction) -> MeroFunction {
    MeroFunction {
        coeffs: f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * b).collect(),
    }
}

/// W f = 1/z + Σ σ_k a_k z^k
pub fn apply_operator(params: &WrightParams, f: &MeroFunction) -> Result<MeroFunction> {
    let coeffs = f
        .terms()
        .map(|(k, a)| sigma_k(params, k).map(|s| s * a))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeroFunction { coeffs })
}
