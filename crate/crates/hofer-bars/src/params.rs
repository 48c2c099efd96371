use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Monotonicity data of the ambient manifold.
///
/// `gamma_hat` is γ/2π and `radius` is R (the ball has capacity 2πR).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldParams {
    pub n: i64,
    /// Minimal Chern number N.
    pub chern: i64,
    pub gamma_hat: Scalar,
    /// σ(λ) ∈ {−1, 0, 1}.
    pub lambda_sign: i64,
    pub radius: Scalar,
    pub exterior_morse_indices: Vec<i64>,
}

impl ManifoldParams {
    pub fn new(
        n: i64,
        chern: i64,
        gamma_hat: Scalar,
        lambda_sign: i64,
        radius: Scalar,
        exterior_morse_indices: Vec<i64>,
    ) -> Result<ManifoldParams> {
        let p = ManifoldParams { n, chern, gamma_hat, lambda_sign, radius, exterior_morse_indices };
        p.validate()?;
        Ok(p)
    }

    /// S² of area 4π: n = 1, N = 2, λ > 0, γ̂ = 2, exterior minimum only.
    pub fn sphere(radius: Scalar) -> Result<ManifoldParams> {
        ManifoldParams::new(1, 2, Scalar::from_int(2), 1, radius, vec![0])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.n < 1 {
            return bad("n must be positive");
        }
        if self.chern < 0 {
            return bad("N must be non-negative");
        }
        if self.gamma_hat.is_negative() {
            return bad("gammaHat must be non-negative");
        }
        if !(-1..=1).contains(&self.lambda_sign) {
            return bad("lambdaSign must be -1, 0 or 1");
        }
        if !self.radius.is_positive() {
            return bad("R must be positive");
        }
        if self.chern == 0 && !self.gamma_hat.is_zero() {
            return bad("N = 0 forces gammaHat = 0");
        }
        if self.lambda_sign == 0 && !self.gamma_hat.is_zero() {
            return bad("lambdaSign = 0 forces gammaHat = 0");
        }
        if !self.gamma_hat.is_zero() && Scalar::from_int(2) * &self.radius > self.gamma_hat {
            return bad("gammaHat must be at least 2R");
        }
        if self.exterior_morse_indices.is_empty() || !self.exterior_morse_indices.contains(&0) {
            return bad("exterior Morse indices must be non-empty and contain 0");
        }
        if self.exterior_morse_indices.iter().any(|&j| j < 0 || j > 2 * self.n - 1) {
            return bad("exterior Morse indices must lie in [0, 2n-1]");
        }
        Ok(())
    }

    /// σ(λ)·γ̂, the action shift of one recapping.
    pub fn recap_shift(&self) -> Scalar {
        Scalar::from_int(self.lambda_sign) * &self.gamma_hat
    }
}
