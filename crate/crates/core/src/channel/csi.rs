//! Bounded, zero-mean channel-estimation error `ĥ = h + Δ`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible `Δ_max / √g_th`.
pub const MAX_DELTA_TO_SQRT_GTH: f64 = 0.3;

/// Truncation radius of the Gaussian family, in units of its scale parameter.
const TRUNC_RADIUS: f64 = 2.5;
// Var[N(0,1) | |x| ≤ 2.5] = 1 - 2·2.5·φ(2.5) / (2Φ(2.5) - 1).
const REAL_TRUNC_VAR_RATIO: f64 = 1.0 - 5.0 * 0.017_528_300_493_568_54 / 0.987_580_669_348_447_6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsiFamily {
    /// `σ_Δ·√(3/2)·(U₁ + iU₂)` with `U` uniform on [-1, 1] (real-only: `σ_Δ·√3·U₁`).
    Uniform,
    /// Circular Gaussian conditioned on `|Δ| ≤ 2.5·scale`, rescaled to variance `σ_Δ²`.
    TruncatedGaussian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsiErrorModel {
    sigma_delta: f64,
    family: CsiFamily,
    real_only: bool,
    scale: f64,
    delta_max: f64,
}

impl CsiErrorModel {
    pub fn new(sigma_delta: f64, family: CsiFamily, real_only: bool) -> Result<Self> {
        if !(sigma_delta >= 0.0) || !sigma_delta.is_finite() {
            return Err(Error::Config(format!(
                "sigma_delta must be finite and non-negative, got {sigma_delta}"
            )));
        }
        let (scale, delta_max) = match (family, real_only) {
            (CsiFamily::Uniform, false) => ((1.5f64).sqrt() * sigma_delta, 3f64.sqrt() * sigma_delta),
            (CsiFamily::Uniform, true) => (3f64.sqrt() * sigma_delta, 3f64.sqrt() * sigma_delta),
            (CsiFamily::TruncatedGaussian, false) => {
                let c2 = TRUNC_RADIUS * TRUNC_RADIUS;
                let ratio = 1.0 - c2 * (-c2).exp() / (1.0 - (-c2).exp());
                let s = sigma_delta / ratio.sqrt();
                (s, TRUNC_RADIUS * s)
            }
            (CsiFamily::TruncatedGaussian, true) => {
                let s = sigma_delta / REAL_TRUNC_VAR_RATIO.sqrt();
                (s, TRUNC_RADIUS * s)
            }
        };
        Ok(Self {
            sigma_delta,
            family,
            real_only,
            scale,
            delta_max,
        })
    }

    pub fn uniform(sigma_delta: f64) -> Result<Self> {
        Self::new(sigma_delta, CsiFamily::Uniform, false)
    }

    pub fn sigma_delta(&self) -> f64 {
        self.sigma_delta
    }

    pub fn delta_max(&self) -> f64 {
        self.delta_max
    }

    pub fn family(&self) -> CsiFamily {
        self.family
    }

    pub fn real_only(&self) -> bool {
        self.real_only
    }

    /// Rejects `Δ_max > 0.3·√g_th`.
    pub fn check_threshold(&self, g_th: f64) -> Result<()> {
        let limit = MAX_DELTA_TO_SQRT_GTH * g_th.max(0.0).sqrt();
        if self.delta_max > limit {
            return Err(Error::Config(format!(
                "CSI error bound {:.6} exceeds 0.3·√g_th = {:.6} (g_th = {g_th})",
                self.delta_max, limit
            )));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        if self.sigma_delta == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match (self.family, self.real_only) {
            (CsiFamily::Uniform, false) => Complex64::new(
                self.scale * rng.random_range(-1.0..=1.0),
                self.scale * rng.random_range(-1.0..=1.0),
            ),
            (CsiFamily::Uniform, true) => {
                Complex64::new(self.scale * rng.random_range(-1.0..=1.0), 0.0)
            }
            (CsiFamily::TruncatedGaussian, false) => {
                // |Δ|²/scale² is Exp(1) truncated at c²; invert its CDF.
                let c2 = TRUNC_RADIUS * TRUNC_RADIUS;
                let u: f64 = rng.random();
                let r2 = -(1.0 - u * (1.0 - (-c2).exp())).ln();
                let phase = rng.random_range(0.0..TAU);
                Complex64::from_polar(self.scale * r2.sqrt(), phase)
            }
            (CsiFamily::TruncatedGaussian, true) => loop {
                let x: f64 = rng.sample(StandardNormal);
                if x.abs() <= TRUNC_RADIUS {
                    break Complex64::new(self.scale * x, 0.0);
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn moments(model: &CsiErrorModel, n: usize) -> (Complex64, f64, f64) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sq = 0.0;
        let mut max: f64 = 0.0;
        for _ in 0..n {
            let d = model.sample(&mut rng);
            sum += d;
            sq += d.norm_sqr();
            max = max.max(d.norm());
        }
        (sum / n as f64, sq / n as f64, max)
    }

    #[test]
    fn families_have_requested_variance_and_bound() {
        let sigma = 0.05;
        for family in [CsiFamily::Uniform, CsiFamily::TruncatedGaussian] {
            for real_only in [false, true] {
                let m = CsiErrorModel::new(sigma, family, real_only).unwrap();
                let n = 200_000;
                let (mean, var, max) = moments(&m, n);
                assert!(max <= m.delta_max() + 1e-15, "{family:?} {real_only}");
                // |mean| well inside 5 standard errors
                assert!(mean.norm() < 5.0 * sigma / (n as f64).sqrt());
                assert!((var / (sigma * sigma) - 1.0).abs() < 0.02, "{family:?} {real_only}: {var}");
            }
        }
    }

    #[test]
    fn zero_sigma_is_exact() {
        let m = CsiErrorModel::uniform(0.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(m.sample(&mut rng), Complex64::new(0.0, 0.0));
        assert_eq!(m.delta_max(), 0.0);
    }

    #[test]
    fn threshold_rule() {
        let m = CsiErrorModel::uniform(0.05).unwrap();
        assert!(m.check_threshold(0.1).is_ok()); // 0.0866 ≤ 0.0949
        assert!(matches!(m.check_threshold(0.05), Err(Error::Config(_))));
        assert!(CsiErrorModel::uniform(-1.0).is_err());
    }
}
