//! Per-coordinate sign-error bounds.
//!
//! `S = √n_b·|g_i|/σ_i` is the gradient-signal-to-data-noise ratio and
//! `ρ = ρ0/σ_z²` the receive SNR. The raw bound functions return the formula
//! value, which may exceed ½; [`as_probability`] applies the ½ ceiling.

use crate::error::{Error, Result};

const TWO_OVER_SQRT3: f64 = 1.154_700_538_379_251_5;

/// Clamp a bound to the ½ ceiling of a better-than-random sign decoder.
pub fn as_probability(bound: f64) -> f64 {
    bound.min(0.5)
}

/// Bound on a single device's sign-flip probability under unimodal symmetric
/// noise (Gauss' inequality halved).
pub fn fail_prob_bound(s: f64) -> f64 {
    debug_assert!(s >= 0.0);
    if s > TWO_OVER_SQRT3 {
        2.0 / (9.0 * s * s)
    } else {
        0.5 - s / (2.0 * 3f64.sqrt())
    }
}

/// `ε = ½ − fail_prob_bound(S)`, the worst-case per-device sign advantage.
pub fn sign_advantage(s: f64) -> f64 {
    0.5 - fail_prob_bound(s)
}

/// `√n_b·|g|/σ`; infinite for a noiseless coordinate.
pub fn grad_snr(g: f64, sigma: f64, n_b: usize) -> f64 {
    if sigma == 0.0 {
        return f64::INFINITY;
    }
    (n_b as f64).sqrt() * g.abs() / sigma
}

/// AWGN bound `1/(√K·S) + 1/(K·S·√ρ) + 1/(2K·√ρ)`.
pub fn perr_bound_awgn(k: usize, s: f64, rho: f64) -> f64 {
    let k = k as f64;
    let inv_sqrt_rho = 1.0 / rho.sqrt();
    1.0 / (k.sqrt() * s) + inv_sqrt_rho / (k * s) + inv_sqrt_rho / (2.0 * k)
}

/// Fading bound conditioned on `K_i` transmitting devices; ½ when none transmit.
pub fn perr_bound_fading_conditional(k_i: usize, s: f64, rho: f64) -> f64 {
    if k_i == 0 {
        return 0.5;
    }
    let k = k_i as f64;
    1.0 / (k.sqrt() * s) + (1.0 / k) * (1.0 / rho.sqrt()) * (1.0 / s + 0.5)
}

/// Unconditional fading bound with perfect CSI.
pub fn perr_bound_fading(k: usize, alpha: f64, s: f64, rho: f64) -> f64 {
    let ak = alpha * k as f64;
    0.5 * (1.0 - alpha).powi(k as i32)
        + 6f64.sqrt() / (ak.sqrt() * s)
        + (2.0 / ak) * (1.0 / rho.sqrt()) * (1.0 / s + 0.5)
}

/// `σ_Δ / √(√g_th − Δ_max)`, the CSI-error coefficient shared by the
/// imperfect-CSI bounds. Errors when `√g_th ≤ Δ_max`.
pub fn csi_error_factor(sigma_delta: f64, g_th: f64, delta_max: f64) -> Result<f64> {
    let gap = g_th.sqrt() - delta_max;
    if !(gap > 0.0) {
        return Err(Error::Domain(format!(
            "imperfect-CSI bound needs √g_th > Δ_max (√g_th = {}, Δ_max = {delta_max})",
            g_th.sqrt()
        )));
    }
    Ok(sigma_delta / gap.sqrt())
}

/// Unconditional fading bound with bounded CSI error.
pub fn perr_bound_imperfect(
    k: usize,
    alpha: f64,
    s: f64,
    rho: f64,
    sigma_delta: f64,
    g_th: f64,
    delta_max: f64,
) -> Result<f64> {
    let csi = csi_error_factor(sigma_delta, g_th, delta_max)?;
    let ak = alpha * k as f64;
    Ok(0.5 * (1.0 - alpha).powi(k as i32)
        + (6f64.sqrt() / ak.sqrt()) * (1.0 / s + (2.0 / s + 1.0) * csi)
        + (2.0 / ak) * (1.0 / rho.sqrt()) * (1.0 / s + 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fail_prob_examples() {
        assert_eq!(fail_prob_bound(0.0), 0.5);
        let knee = 2.0 / 3f64.sqrt();
        assert!((fail_prob_bound(knee) - 1.0 / 6.0).abs() < 1e-15);
        assert!((2.0 / (9.0 * knee * knee) - 1.0 / 6.0).abs() < 1e-15);
        assert!((fail_prob_bound(3.0) - 2.0 / 81.0).abs() < 1e-17);
    }

    #[test]
    fn fail_prob_non_increasing() {
        let mut prev = fail_prob_bound(0.0);
        for i in 1..5000 {
            let v = fail_prob_bound(i as f64 * 0.002);
            assert!(v <= prev);
            assert!((0.0..=0.5).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn sign_advantage_identities() {
        for i in 1..2000 {
            let s = i as f64 * 0.005;
            let eps = sign_advantage(s);
            assert!(1.0 / (4.0 * eps * eps) - 1.0 <= 4.0 / (s * s) * (1.0 + 1e-12));
            assert!(1.0 / eps <= (4.0 / s + 2.0) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn grad_snr_examples() {
        assert_eq!(grad_snr(1.0, 1.0, 4), 2.0);
        assert_eq!(grad_snr(0.0, 1.0, 4), 0.0);
        assert_eq!(grad_snr(1.0, 0.0, 4), f64::INFINITY);
        assert!((grad_snr(0.7, 0.3, 8) / grad_snr(0.7, 0.3, 4) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn awgn_example_and_limits() {
        let v = perr_bound_awgn(100, 1.0, 10.0);
        assert!((v - 0.104_743_416_490_252_57).abs() < 1e-15);
        assert!((perr_bound_awgn(100, 1.0, f64::INFINITY) - 0.1).abs() < 1e-15);
        assert!(perr_bound_awgn(100, 1.0, 10.0) < perr_bound_awgn(50, 1.0, 10.0));
        assert!(perr_bound_awgn(100, 2.0, 10.0) < perr_bound_awgn(100, 1.0, 10.0));
        assert!(perr_bound_awgn(100, 1.0, 20.0) < perr_bound_awgn(100, 1.0, 10.0));
    }

    #[test]
    fn conditional_examples() {
        assert_eq!(perr_bound_fading_conditional(0, 1.0, 10.0), 0.5);
        let v = perr_bound_fading_conditional(1, 1.0, 1.0);
        assert!((v - 2.5).abs() < 1e-15);
        assert_eq!(as_probability(v), 0.5);
        for (k, s, rho) in [(100, 1.0, 10.0), (7, 0.3, 2.0)] {
            let a = perr_bound_fading_conditional(k, s, rho);
            assert!((a - perr_bound_awgn(k, s, rho)).abs() < 1e-15);
        }
    }

    #[test]
    fn fading_example() {
        let v = perr_bound_fading(100, 0.9, 1.0, 10.0);
        // 0.5·0.1^100 + √6/√90 + (2/90)(1/√10)(1.5)
        let expected = 6f64.sqrt() / 90f64.sqrt() + (2.0 / 90.0) / 10f64.sqrt() * 1.5;
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.268_740).abs() < 1e-5);
        let full = perr_bound_fading(400, 1.0, 1.0, 10.0);
        assert!((full - (6f64.sqrt() / 20.0 + (2.0 / 400.0) / 10f64.sqrt() * 1.5)).abs() < 1e-15);
    }

    #[test]
    fn fading_exceeds_awgn_below_full_survival() {
        for k in [1, 5, 20, 100, 1000] {
            for alpha in [0.1, 0.5, 0.9, 0.99] {
                for s in [0.2, 1.0, 4.0] {
                    for rho in [0.5, 10.0, 1e4] {
                        assert!(perr_bound_fading(k, alpha, s, rho) > perr_bound_awgn(k, s, rho));
                    }
                }
            }
        }
    }

    #[test]
    fn imperfect_reduces_and_grows() {
        let g_th = -(0.9f64).ln();
        let base = perr_bound_fading(100, 0.9, 1.0, 10.0);
        let zero = perr_bound_imperfect(100, 0.9, 1.0, 10.0, 0.0, g_th, 0.0).unwrap();
        assert!((zero - base).abs() < 1e-15);
        let mut prev = zero;
        for i in 1..20 {
            let sd = i as f64 * 0.002;
            let v = perr_bound_imperfect(100, 0.9, 1.0, 10.0, sd, g_th, sd * 3f64.sqrt()).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(matches!(
            perr_bound_imperfect(100, 0.9, 1.0, 10.0, 0.1, g_th, 0.4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn imperfect_golden_value() {
        // mpmath evaluation (scripts/golden_bounds.py): K=100, α=0.9, S=1,
        // ρ=10, g_th=ln(1/0.9), σ_Δ=0.01, Δ_max=0.01·√3.
        let g_th = (1.0f64 / 0.9).ln();
        let v = perr_bound_imperfect(100, 0.9, 1.0, 10.0, 0.01, g_th, 0.01 * 3f64.sqrt()).unwrap();
        assert!((v - IMPERFECT_GOLDEN).abs() < 1e-14 * IMPERFECT_GOLDEN);
    }

    const IMPERFECT_GOLDEN: f64 = 0.282_713_594_999_863_3;
}
