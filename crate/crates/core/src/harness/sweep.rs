//! Tabulate convergence-bound terms over a parameter grid.

use std::path::Path;

use serde::Serialize;

use super::config::SweepConfig;
use crate::analysis::{conv_bound, BoundScenario, LandscapeConstants, ScenarioParams};
use crate::channel::CsiErrorModel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub scenario: BoundScenario,
    pub k: usize,
    pub rho_db: f64,
    pub alpha: f64,
    pub sigma_delta: f64,
}

impl SweepPoint {
    /// `g_th = −ln α` and the uniform-family `Δ_max` for imperfect CSI.
    pub fn params(&self) -> Result<ScenarioParams> {
        let rho = 10f64.powf(self.rho_db / 10.0);
        Ok(match self.scenario {
            BoundScenario::Noiseless | BoundScenario::Awgn => ScenarioParams::awgn(self.k, rho),
            BoundScenario::Fading => ScenarioParams::fading(self.k, rho, self.alpha),
            BoundScenario::Imperfect => ScenarioParams::fading(self.k, rho, self.alpha).with_csi_error(
                self.sigma_delta,
                CsiErrorModel::uniform(self.sigma_delta)?.delta_max(),
            ),
        })
    }
}

/// Grid points; each scenario only spans the axes it depends on.
pub fn sweep_points(cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let mut pts = Vec::new();
    for name in &cfg.scenarios {
        let scenario = BoundScenario::parse(name)
            .ok_or_else(|| Error::Config(format!("unknown sweep scenario {name:?}")))?;
        let (alphas, sds) = match scenario {
            BoundScenario::Noiseless | BoundScenario::Awgn => (vec![1.0], vec![0.0]),
            BoundScenario::Fading => (cfg.alpha.clone(), vec![0.0]),
            BoundScenario::Imperfect => (cfg.alpha.clone(), cfg.sigma_delta.clone()),
        };
        for &k in &cfg.k {
            for &rho_db in &cfg.rho_db {
                for &alpha in &alphas {
                    for &sigma_delta in &sds {
                        pts.push(SweepPoint {
                            scenario,
                            k,
                            rho_db,
                            alpha,
                            sigma_delta,
                        });
                    }
                }
            }
        }
    }
    Ok(pts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario: &'static str,
    #[serde(rename = "K")]
    pub k: usize,
    pub rho_db: f64,
    pub alpha: f64,
    pub sigma_delta: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub rhs: Option<f64>,
    /// The bound is undefined here (non-positive denominator or √g_th ≤ Δ_max).
    pub vacuous: bool,
}

pub fn sweep_bounds(cfg: &SweepConfig, gamma: f64, rounds: usize) -> Result<Vec<SweepRow>> {
    let constants = LandscapeConstants {
        l1: cfg.l1,
        sigma1: cfg.sigma1,
        f0: cfg.f0,
        fstar: cfg.fstar,
        gamma,
        n: rounds,
    };
    sweep_points(cfg)?
        .into_iter()
        .map(|p| {
            let row = |a, b, rhs, vacuous| SweepRow {
                scenario: p.scenario.name(),
                k: p.k,
                rho_db: p.rho_db,
                alpha: p.alpha,
                sigma_delta: p.sigma_delta,
                a,
                b,
                rhs,
                vacuous,
            };
            match conv_bound(&p.params()?, &constants, p.scenario) {
                Ok(r) => Ok(row(Some(r.a), Some(r.b), Some(r.rhs), false)),
                Err(Error::VacuousBound { .. }) | Err(Error::Domain(_)) => Ok(row(None, None, None, true)),
                Err(e) => Err(e),
            }
        })
        .collect()
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
