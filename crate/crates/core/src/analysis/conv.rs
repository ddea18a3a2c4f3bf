//! Convergence-rate bounds on `E[(1/N)·Σ‖g⁽ⁿ⁾‖₁]`.
//!
//! Every scenario has the form `(a/√N)·(√‖L‖₁·(F⁰ − F* + γ/2) + 2γ‖σ‖₁/√K + b)`,
//! with the scaling factor `a ≥ 1` and bias `b ≥ 0` carrying the channel.

use serde::{Deserialize, Serialize};

use super::perr::csi_error_factor;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundScenario {
    Noiseless,
    Awgn,
    Fading,
    Imperfect,
}

impl BoundScenario {
    pub const ALL: [BoundScenario; 4] = [
        BoundScenario::Noiseless,
        BoundScenario::Awgn,
        BoundScenario::Fading,
        BoundScenario::Imperfect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundScenario::Noiseless => "noiseless",
            BoundScenario::Awgn => "awgn",
            BoundScenario::Fading => "fading",
            BoundScenario::Imperfect => "imperfect",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// Channel-side parameters of a scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioParams {
    pub k: usize,
    /// Receive SNR `ρ0/σ_z²` (linear).
    pub rho: f64,
    pub alpha: f64,
    pub sigma_delta: f64,
    pub g_th: f64,
    pub delta_max: f64,
}

impl ScenarioParams {
    pub fn awgn(k: usize, rho: f64) -> Self {
        Self {
            k,
            rho,
            alpha: 1.0,
            sigma_delta: 0.0,
            g_th: 0.0,
            delta_max: 0.0,
        }
    }

    /// Fading scenario with `g_th = −ln α`.
    pub fn fading(k: usize, rho: f64, alpha: f64) -> Self {
        Self {
            k,
            rho,
            alpha,
            sigma_delta: 0.0,
            g_th: -alpha.ln(),
            delta_max: 0.0,
        }
    }

    pub fn with_csi_error(self, sigma_delta: f64, delta_max: f64) -> Self {
        Self {
            sigma_delta,
            delta_max,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidInput("K must be ≥ 1".into()));
        }
        if !(self.rho > 0.0) {
            return Err(Error::InvalidInput(format!("ρ must be > 0, got {}", self.rho)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidInput(format!("α must lie in (0, 1], got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Loss-landscape constants entering the bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeConstants {
    pub l1: f64,
    pub sigma1: f64,
    pub f0: f64,
    pub fstar: f64,
    pub gamma: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub scenario: BoundScenario,
    pub a: f64,
    pub b: f64,
    pub rhs: f64,
}

/// Denominator of `a` and the bias `b` for a scenario.
pub fn scaling_terms(
    params: &ScenarioParams,
    gamma_sigma1: f64,
    which: BoundScenario,
) -> Result<(f64, f64)> {
    params.validate()?;
    let k = params.k as f64;
    let sqrt_rho = params.rho.sqrt();
    let alpha_k = params.alpha * k;
    let none_transmit = (1.0 - params.alpha).powi(params.k as i32);
    Ok(match which {
        BoundScenario::Noiseless => (1.0, 0.0),
        BoundScenario::Awgn => (
            1.0 - 1.0 / (k * sqrt_rho),
            2.0 * gamma_sigma1 / (k * sqrt_rho),
        ),
        BoundScenario::Fading => (
            1.0 - none_transmit - 2.0 / (alpha_k * sqrt_rho),
            4.0 * gamma_sigma1 / (alpha_k * sqrt_rho),
        ),
        BoundScenario::Imperfect => {
            let csi = 6f64.sqrt() * csi_error_factor(params.sigma_delta, params.g_th, params.delta_max)?
                / alpha_k.sqrt();
            (
                1.0 - none_transmit - 2.0 / (alpha_k * sqrt_rho) - 2.0 * csi,
                (4.0 / (alpha_k * sqrt_rho) + 4.0 * csi) * gamma_sigma1,
            )
        }
    })
}

pub fn conv_bound(
    params: &ScenarioParams,
    constants: &LandscapeConstants,
    which: BoundScenario,
) -> Result<BoundReport> {
    if constants.n == 0 || !(constants.gamma > 0.0) {
        return Err(Error::InvalidInput("bound needs N ≥ 1 and γ > 0".into()));
    }
    let gs = constants.gamma * constants.sigma1;
    let (denominator, b) = scaling_terms(params, gs, which)?;
    if !(denominator > 0.0) {
        return Err(Error::VacuousBound {
            scenario: which.name(),
            denominator,
        });
    }
    let a = 1.0 / denominator;
    let core = constants.l1.sqrt() * (constants.f0 - constants.fstar + constants.gamma / 2.0)
        + 2.0 * gs / (params.k as f64).sqrt();
    let rhs = a / (constants.n as f64).sqrt() * (core + b);
    Ok(BoundReport {
        scenario: which,
        a,
        b,
        rhs,
    })
}
