//! End-to-end training loop: local gradients, sign quantization, over-the-air
//! majority vote and the signSGD update.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{LandscapeKind, RunConfig, Scenario};
use crate::aggregate::{air_superpose, majority_vote, Frame, RoundKeys, Uplink};
use crate::analysis::{conv_bound, BoundReport, BoundScenario, LandscapeConstants, ScenarioParams};
use crate::channel::{derive_policy, exp_integral_ei, ChannelMode, CsiErrorModel};
use crate::error::{Error, Result};
use crate::learn::{
    apply_update, bundled_digits, load_delimited, local_gradient, normalize_with_bias, partition,
    theorem_hyperparams, train_test_split, DeviceDataset, Hyperparams, LogisticLandscape,
    LossLandscape, ModelState, QuadraticLandscape, Sample,
};
use crate::rng::{stream, Purpose};
use crate::signal::{l1_norm, sign_of, sign_quantize, SignVector};

/// Fraction of the labelled data held out for test accuracy.
pub const TEST_FRACTION: f64 = 0.2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: u64,
    /// `‖∇F(w⁽ⁿ⁾)‖₁` before the update of round `n`.
    pub g_l1: f64,
    pub g_l1_timeavg: f64,
    /// Test accuracy after the update; logistic landscape only.
    pub accuracy: Option<f64>,
    /// Fraction of coordinates whose decoded sign differs from `sign(∇F)`.
    pub ber_emp: f64,
    /// Fraction of device transmissions cut off by the power-control threshold.
    pub trunc_frac: f64,
}

enum Model {
    Quadratic(QuadraticLandscape),
    Logistic {
        land: LogisticLandscape,
        test: Vec<Sample>,
    },
}

/// Training data, devices and step sizes shared by every scenario of a seed.
pub struct Problem {
    model: Model,
    devices: Vec<DeviceDataset>,
    pub hyper: Hyperparams,
    pub w0: Vec<f64>,
}

impl Problem {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let (model, parts, w0) = match cfg.landscape {
            LandscapeKind::Quadratic => {
                let mut rng = stream(cfg.seed, Purpose::Dataset, &[0]);
                let land =
                    QuadraticLandscape::synthetic(cfg.q, cfg.k * cfg.samples_per_device, &mut rng)?;
                let parts: Vec<Vec<Sample>> = land
                    .samples()
                    .chunks_exact(cfg.samples_per_device)
                    .map(<[Sample]>::to_vec)
                    .collect();
                let w0 = land.minimizer().iter().map(|m| m + 1.0).collect();
                (Model::Quadratic(land), parts, w0)
            }
            LandscapeKind::Logistic => {
                let mut data = match &cfg.dataset_path {
                    Some(p) => load_delimited(p)?,
                    None => bundled_digits(),
                };
                normalize_with_bias(&mut data);
                let dim = data[0].features.len();
                if dim != cfg.q {
                    return Err(Error::Config(format!(
                        "q = {} but the dataset gives {dim} parameters (features + bias)",
                        cfg.q
                    )));
                }
                let (train, test) =
                    train_test_split(data, TEST_FRACTION, &mut stream(cfg.seed, Purpose::Split, &[]));
                let parts = partition(&train, cfg.k, &mut stream(cfg.seed, Purpose::Dataset, &[1]))?;
                let land = LogisticLandscape::new(train, cfg.lambda)?;
                (Model::Logistic { land, test }, parts, vec![0.0; cfg.q])
            }
        };
        let d = parts[0].len();
        let hyper = theorem_hyperparams(landscape_of(&model).smoothness(), cfg.n, cfg.gamma, d)?;
        let devices = parts
            .into_iter()
            .map(|p| DeviceDataset::new(p, hyper.batch_size))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model,
            devices,
            hyper,
            w0,
        })
    }

    pub fn landscape(&self) -> &dyn LossLandscape {
        landscape_of(&self.model)
    }

    pub fn devices(&self) -> &[DeviceDataset] {
        &self.devices
    }

    pub fn accuracy(&self, w: &[f64]) -> Option<f64> {
        match &self.model {
            Model::Quadratic(_) => None,
            Model::Logistic { land, test } => Some(land.accuracy(w, test)),
        }
    }

    /// `‖σ‖₁` for the bound: per-coordinate worst-device deviation of sample
    /// gradients around the global gradient, exact for the quadratic and
    /// evaluated at `w0` for the logistic landscape.
    pub fn sigma_l1(&self) -> f64 {
        match &self.model {
            Model::Quadratic(land) => {
                let parts: Vec<&[Sample]> = self.devices.iter().map(|d| d.samples()).collect();
                land.device_sigma(&parts).iter().sum()
            }
            Model::Logistic { land, .. } => {
                let full = land.full_gradient(&self.w0);
                let q = full.len();
                let mut worst = vec![0.0f64; q];
                for d in &self.devices {
                    let mut acc = vec![0.0; q];
                    for s in d.samples() {
                        let g = land.sample_gradient(&self.w0, s);
                        for i in 0..q {
                            acc[i] += (g[i] - full[i]).powi(2);
                        }
                    }
                    for i in 0..q {
                        worst[i] = worst[i].max((acc[i] / d.len() as f64).sqrt());
                    }
                }
                worst.iter().sum()
            }
        }
    }

    pub fn constants(&self, cfg: &RunConfig) -> LandscapeConstants {
        let land = self.landscape();
        LandscapeConstants {
            l1: land.smoothness().iter().sum(),
            sigma1: self.sigma_l1(),
            f0: land.loss(&self.w0),
            fstar: land.lower_bound(),
            gamma: cfg.gamma,
            n: cfg.n,
        }
    }
}

fn landscape_of(model: &Model) -> &dyn LossLandscape {
    match model {
        Model::Quadratic(l) => l,
        Model::Logistic { land, .. } => land,
    }
}

fn uplink(cfg: &RunConfig, mode: ChannelMode) -> Result<Uplink> {
    // Unit power per sub-channel; σ_z² = P0/(M·ρ).
    let p0 = cfg.m as f64;
    let policy = derive_policy(p0, cfg.m, cfg.g_th, mode)?;
    let csi = match mode {
        ChannelMode::FadingImperfectCsi => {
            let model = CsiErrorModel::uniform(cfg.sigma_delta)?;
            model.check_threshold(cfg.g_th)?;
            Some(model)
        }
        _ => None,
    };
    Ok(Uplink {
        policy,
        sigma_z: (1.0 / cfg.snr_linear()).sqrt(),
        csi,
        frame: Frame::new(cfg.q, cfg.m, cfg.modulation)?,
    })
}

/// Channel side of the convergence bound for a scenario.
pub fn scenario_bound_params(cfg: &RunConfig, scenario: Scenario) -> Result<(ScenarioParams, BoundScenario)> {
    let rho = cfg.snr_linear();
    let alpha = (-cfg.g_th).exp();
    Ok(match scenario {
        Scenario::Noiseless => (ScenarioParams::awgn(cfg.k, rho), BoundScenario::Noiseless),
        Scenario::Awgn => (ScenarioParams::awgn(cfg.k, rho), BoundScenario::Awgn),
        Scenario::FadingPerfectCsi => {
            let p = ScenarioParams {
                g_th: cfg.g_th,
                ..ScenarioParams::fading(cfg.k, rho / exp_integral_ei(cfg.g_th)?, alpha)
            };
            (p, BoundScenario::Fading)
        }
        Scenario::FadingImperfectCsi => {
            let model = CsiErrorModel::uniform(cfg.sigma_delta)?;
            let p = ScenarioParams {
                g_th: cfg.g_th,
                ..ScenarioParams::fading(cfg.k, rho / exp_integral_ei(cfg.g_th)?, alpha)
            }
            .with_csi_error(cfg.sigma_delta, model.delta_max());
            (p, BoundScenario::Imperfect)
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub scenario: Scenario,
    pub seed: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub eta: f64,
    pub batch_size: usize,
    pub batch_clamped: bool,
    pub final_accuracy: Option<f64>,
    pub g_l1_timeavg: f64,
    pub bound: Option<BoundReport>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub records: Vec<RoundRecord>,
    pub summary: RunSummary,
}

/// Run `N` rounds of one-bit over-the-air training for one scenario.
pub fn run_feel(cfg: &RunConfig, scenario: Scenario) -> Result<RunOutcome> {
    let problem = Problem::build(cfg)?;
    run_on(cfg, &problem, scenario)
}

/// [`run_feel`] on a prebuilt problem, so scenarios of one seed share data.
pub fn run_on(cfg: &RunConfig, problem: &Problem, scenario: Scenario) -> Result<RunOutcome> {
    let up = scenario.channel_mode().map(|m| uplink(cfg, m)).transpose()?;
    let land = problem.landscape();
    let mut model = ModelState::new(problem.w0.clone())?;
    let mut records = Vec::with_capacity(cfg.n);
    let mut running = 0.0;
    for n in 0..cfg.n as u64 {
        let signs: Vec<SignVector> = problem
            .devices
            .par_iter()
            .enumerate()
            .map(|(k, d)| {
                let mut rng = stream(cfg.seed, Purpose::Batch, &[n, k as u64]);
                sign_quantize(local_gradient(land, &model, d, &mut rng)?.as_slice())
            })
            .collect::<Result<_>>()?;
        let (v, trunc_frac) = match &up {
            None => (noiseless_vote(&signs)?, 0.0),
            Some(up) => {
                let blocks = air_superpose(&signs, up, RoundKeys { seed: cfg.seed, round: n })?;
                let sent = (signs.len() * up.frame.channel_symbols()) as f64;
                let kept: u64 = blocks
                    .iter()
                    .flat_map(|b| b.contributing_counts.iter())
                    .map(|&c| u64::from(c))
                    .sum();
                (majority_vote(&blocks, &up.frame)?, 1.0 - kept as f64 / sent)
            }
        };
        let full = land.full_gradient(&model.w);
        let g_l1 = l1_norm(&full);
        let wrong = full.iter().zip(v.iter()).filter(|(g, s)| sign_of(**g) != *s).count();
        model = apply_update(&model, &v, problem.hyper.eta)?;
        running += g_l1;
        records.push(RoundRecord {
            round: n,
            g_l1,
            g_l1_timeavg: running / (n + 1) as f64,
            accuracy: problem.accuracy(&model.w),
            ber_emp: wrong as f64 / cfg.q as f64,
            trunc_frac,
        });
    }
    let last = records.last().expect("N ≥ 1");
    let (params, which) = scenario_bound_params(cfg, scenario)?;
    let bound = match conv_bound(&params, &problem.constants(cfg), which) {
        Ok(b) => Some(b),
        Err(Error::VacuousBound { denominator, .. }) => {
            log::warn!("{}: bound is vacuous (denominator {denominator:.3e})", scenario.name());
            None
        }
        Err(e) => return Err(e),
    };
    let summary = RunSummary {
        scenario,
        seed: cfg.seed,
        k: cfg.k,
        eta: problem.hyper.eta,
        batch_size: problem.hyper.batch_size,
        batch_clamped: problem.hyper.clamped,
        final_accuracy: last.accuracy,
        g_l1_timeavg: last.g_l1_timeavg,
        bound,
    };
    Ok(RunOutcome { records, summary })
}

fn noiseless_vote(signs: &[SignVector]) -> Result<SignVector> {
    let q = signs[0].len();
    let mut tally = vec![0i64; q];
    for s in signs {
        for (t, v) in tally.iter_mut().zip(s.iter()) {
            *t += i64::from(v);
        }
    }
    SignVector::new(tally.into_iter().map(|t| sign_of(t as f64)).collect())
}

pub fn write_records(path: &Path, records: &[RoundRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Final accuracy per device count, one row per `(K, scenario)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KSweepRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub scenario: &'static str,
    pub final_accuracy: Option<f64>,
    pub g_l1_timeavg: f64,
}

/// Run every selected scenario and write `rounds_<scenario>.csv`,
/// `summary.json` and, with a `k_sweep`, `accuracy_vs_k.csv`.
pub fn run_experiment(cfg: &RunConfig, out: &Path) -> Result<Vec<RunSummary>> {
    std::fs::create_dir_all(out)?;
    let scenarios = cfg.mode.scenarios();
    let problem = Problem::build(cfg)?;
    if problem.hyper.clamped {
        log::warn!("n_b clamped to the local dataset size {}", problem.hyper.batch_size);
    }
    let mut summaries = Vec::new();
    for &s in &scenarios {
        let outcome = run_on(cfg, &problem, s)?;
        write_records(&out.join(format!("rounds_{}.csv", s.name())), &outcome.records)?;
        log::info!(
            "{}: time-averaged ‖g‖₁ {:.4}, final accuracy {:?}",
            s.name(),
            outcome.summary.g_l1_timeavg,
            outcome.summary.final_accuracy
        );
        summaries.push(outcome.summary);
    }
    std::fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summaries)? + "\n")?;
    if !cfg.k_sweep.is_empty() {
        let mut w = csv::Writer::from_path(out.join("accuracy_vs_k.csv"))?;
        for &k in &cfg.k_sweep {
            let sub = RunConfig { k, ..cfg.clone() };
            let p = Problem::build(&sub)?;
            for &s in &scenarios {
                let o = run_on(&sub, &p, s)?;
                w.serialize(KSweepRow {
                    k,
                    scenario: s.name(),
                    final_accuracy: o.summary.final_accuracy,
                    g_l1_timeavg: o.summary.g_l1_timeavg,
                })?;
            }
        }
        w.flush()?;
    }
    Ok(summaries)
}
