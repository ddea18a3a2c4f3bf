//! Monte Carlo check of the per-coordinate sign-error bounds.
//!
//! One trial decodes a single coordinate whose true gradient sign is `+1`.
//! Device `k` observes `S + ξ_k` with `ξ_k ~ N(0, 1)` and sends its sign.
//! The server sees `Σ_k Re(h_k·p_k)·s_k + z` with `z ~ N(0, 1/ρ)` after
//! normalising by `√ρ0`: the gain is 1 under AWGN, 1 or 0 (truncated) under
//! perfect-CSI fading, and `Re(h/ĥ)` or 0 under imperfect CSI.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::config::VerifyConfig;
use crate::analysis::{as_probability, perr_bound_awgn, perr_bound_fading, perr_bound_imperfect};
use crate::channel::{sample_cn01, CsiErrorModel};
use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};

const CHUNK: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerrScenario {
    Awgn,
    Fading,
    Imperfect,
}

impl PerrScenario {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "awgn" => Ok(Self::Awgn),
            "fading" => Ok(Self::Fading),
            "imperfect" => Ok(Self::Imperfect),
            _ => Err(Error::Config(format!(
                "unknown verify scenario {s:?} (expected awgn, fading or imperfect)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerrPoint {
    pub scenario: PerrScenario,
    pub k: usize,
    pub s: f64,
    pub rho_db: f64,
    pub alpha: f64,
    pub sigma_delta: f64,
}

impl PerrPoint {
    fn rho(&self) -> f64 {
        10f64.powf(self.rho_db / 10.0)
    }

    fn g_th(&self) -> f64 {
        -self.alpha.ln()
    }

    fn csi(&self) -> Result<Option<CsiErrorModel>> {
        if self.scenario != PerrScenario::Imperfect {
            return Ok(None);
        }
        let m = CsiErrorModel::uniform(self.sigma_delta)?;
        m.check_threshold(self.g_th())?;
        Ok(Some(m))
    }

    /// Bound value before the ½ ceiling.
    pub fn raw_bound(&self) -> Result<f64> {
        let rho = self.rho();
        Ok(match self.scenario {
            PerrScenario::Awgn => perr_bound_awgn(self.k, self.s, rho),
            PerrScenario::Fading => perr_bound_fading(self.k, self.alpha, self.s, rho),
            PerrScenario::Imperfect => {
                let dmax = CsiErrorModel::uniform(self.sigma_delta)?.delta_max();
                perr_bound_imperfect(self.k, self.alpha, self.s, rho, self.sigma_delta, self.g_th(), dmax)?
            }
        })
    }
}

/// Expand the configured grid: AWGN ignores `α` and `σ_Δ`, fading uses
/// `σ_Δ = 0`, imperfect CSI takes every `σ_Δ`.
pub fn grid(cfg: &VerifyConfig) -> Result<Vec<PerrPoint>> {
    let mut pts = Vec::new();
    for name in &cfg.scenarios {
        let scenario = PerrScenario::parse(name)?;
        let (alphas, sds): (Vec<f64>, Vec<f64>) = match scenario {
            PerrScenario::Awgn => (vec![1.0], vec![0.0]),
            PerrScenario::Fading => (cfg.alpha.clone(), vec![0.0]),
            PerrScenario::Imperfect => (cfg.alpha.clone(), cfg.sigma_delta.clone()),
        };
        for &k in &cfg.k {
            for &s in &cfg.s {
                for &rho_db in &cfg.rho_db {
                    for &alpha in &alphas {
                        for &sigma_delta in &sds {
                            pts.push(PerrPoint {
                                scenario,
                                k,
                                s,
                                rho_db,
                                alpha,
                                sigma_delta,
                            });
                        }
                    }
                }
            }
        }
    }
    for p in &pts {
        if p.k == 0 || !(p.s > 0.0) || !(p.alpha > 0.0 && p.alpha <= 1.0) {
            return Err(Error::Config(format!("invalid verify point {p:?}")));
        }
        if p.scenario != PerrScenario::Awgn && p.alpha == 1.0 {
            return Err(Error::Config("fading points need α < 1".into()));
        }
    }
    Ok(pts)
}

/// Count decoding errors over `trials` independent coordinates.
pub fn simulate_errors(point: &PerrPoint, trials: u64, seed: u64, tag: u64) -> Result<u64> {
    let csi = point.csi()?;
    let noise_std = (1.0 / point.rho()).sqrt();
    let g_th = point.g_th();
    let chunks = trials.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, Purpose::Verify, &[tag, c]);
            let n = CHUNK.min(trials - c * CHUNK);
            let mut errors = 0u64;
            for _ in 0..n {
                let mut y = 0.0;
                for _ in 0..point.k {
                    let xi: f64 = rng.sample(StandardNormal);
                    let s = if point.s + xi >= 0.0 { 1.0 } else { -1.0 };
                    y += s * gain(point.scenario, g_th, csi.as_ref(), &mut rng);
                }
                let z: f64 = rng.sample(StandardNormal);
                y += noise_std * z;
                if y < 0.0 {
                    errors += 1;
                }
            }
            errors
        })
        .sum())
}

fn gain<R: Rng + ?Sized>(
    scenario: PerrScenario,
    g_th: f64,
    csi: Option<&CsiErrorModel>,
    rng: &mut R,
) -> f64 {
    match scenario {
        PerrScenario::Awgn => 1.0,
        PerrScenario::Fading => {
            if sample_cn01(rng).norm_sqr() >= g_th {
                1.0
            } else {
                0.0
            }
        }
        PerrScenario::Imperfect => {
            let h = sample_cn01(rng);
            let h_hat = h + csi.expect("imperfect point has a model").sample(rng);
            if h_hat.norm_sqr() >= g_th {
                (h / h_hat).re
            } else {
                0.0
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyRow {
    pub scenario: PerrScenario,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "S")]
    pub s: f64,
    pub rho_db: f64,
    pub alpha: f64,
    pub sigma_delta: f64,
    pub trials: u64,
    pub p_emp: f64,
    pub p_bound: f64,
    /// `p_bound + 3σ − p_emp`; negative means failure.
    pub margin: f64,
    pub pass: bool,
}

pub fn verify_point(point: &PerrPoint, trials: u64, seed: u64, tag: u64) -> Result<VerifyRow> {
    let errors = simulate_errors(point, trials, seed, tag)?;
    let p_emp = errors as f64 / trials as f64;
    let p_bound = as_probability(point.raw_bound()?);
    let band = 3.0 * (p_bound * (1.0 - p_bound) / trials as f64).sqrt();
    let margin = p_bound + band - p_emp;
    Ok(VerifyRow {
        scenario: point.scenario,
        k: point.k,
        s: point.s,
        rho_db: point.rho_db,
        alpha: point.alpha,
        sigma_delta: point.sigma_delta,
        trials,
        p_emp,
        p_bound,
        margin,
        pass: margin >= 0.0,
    })
}

/// Evaluate every grid point; the tag of a point is its position in the grid.
pub fn verify_perr(cfg: &VerifyConfig, seed: u64) -> Result<Vec<VerifyRow>> {
    if cfg.trials < 10_000 {
        return Err(Error::Config(format!("verify needs ≥ 10⁴ trials per point, got {}", cfg.trials)));
    }
    grid(cfg)?
        .iter()
        .enumerate()
        .map(|(i, p)| verify_point(p, cfg.trials, seed, i as u64))
        .collect()
}

pub fn write_verify(path: &Path, rows: &[VerifyRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
