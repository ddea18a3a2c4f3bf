//! Run configuration (TOML). Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::ChannelMode;
use crate::error::{Error, Result};
use crate::signal::Modulation;

/// Transmission scenario of a training run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Error-free majority vote over the devices' signs.
    Noiseless,
    Awgn,
    FadingPerfectCsi,
    FadingImperfectCsi,
}

impl Scenario {
    pub const CHANNELS: [Scenario; 3] = [
        Scenario::Awgn,
        Scenario::FadingPerfectCsi,
        Scenario::FadingImperfectCsi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Noiseless => "noiseless",
            Scenario::Awgn => "awgn",
            Scenario::FadingPerfectCsi => "fading_perfect_csi",
            Scenario::FadingImperfectCsi => "fading_imperfect_csi",
        }
    }

    pub fn channel_mode(self) -> Option<ChannelMode> {
        match self {
            Scenario::Noiseless => None,
            Scenario::Awgn => Some(ChannelMode::Awgn),
            Scenario::FadingPerfectCsi => Some(ChannelMode::FadingPerfectCsi),
            Scenario::FadingImperfectCsi => Some(ChannelMode::FadingImperfectCsi),
        }
    }
}

/// `mode` key: one scenario, or `all` for noiseless plus the three channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeSelection {
    One(Scenario),
    All(AllTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllTag {
    All,
}

impl ModeSelection {
    pub fn scenarios(self) -> Vec<Scenario> {
        match self {
            ModeSelection::One(s) => vec![s],
            ModeSelection::All(_) => vec![
                Scenario::Noiseless,
                Scenario::Awgn,
                Scenario::FadingPerfectCsi,
                Scenario::FadingImperfectCsi,
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandscapeKind {
    Quadratic,
    Logistic,
}

/// Grid for `verify-perr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Any of `awgn`, `fading`, `imperfect`.
    pub scenarios: Vec<String>,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    pub rho_db: Vec<f64>,
    pub alpha: Vec<f64>,
    pub sigma_delta: Vec<f64>,
    pub trials: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            scenarios: vec!["awgn".into(), "fading".into(), "imperfect".into()],
            k: vec![1, 10, 100],
            s: vec![0.5, 1.0, 2.0, 5.0],
            rho_db: vec![0.0, 10.0, 20.0],
            alpha: vec![0.5, 0.9],
            sigma_delta: vec![0.0, 0.02, 0.05],
            trials: 100_000,
        }
    }
}

/// Grid and landscape constants for `sweep-bounds`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Any of `noiseless`, `awgn`, `fading`, `imperfect`.
    pub scenarios: Vec<String>,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    pub rho_db: Vec<f64>,
    pub alpha: Vec<f64>,
    pub sigma_delta: Vec<f64>,
    pub l1: f64,
    pub sigma1: f64,
    pub f0: f64,
    pub fstar: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scenarios: vec!["noiseless".into(), "awgn".into(), "fading".into(), "imperfect".into()],
            k: vec![10, 20, 50, 100, 200, 500, 1000],
            rho_db: vec![0.0, 10.0, 20.0],
            alpha: vec![0.5, 0.9],
            sigma_delta: vec![0.0, 0.02, 0.05],
            l1: 25.0,
            sigma1: 25.0,
            f0: 13.0,
            fstar: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "K", default = "d_k")]
    pub k: usize,
    #[serde(rename = "M", default = "d_m")]
    pub m: usize,
    #[serde(rename = "N", default = "d_n")]
    pub n: usize,
    #[serde(default = "d_q")]
    pub q: usize,
    /// `10·log10(P0/(M·σ_z²))`.
    #[serde(default = "d_snr")]
    pub snr_db: f64,
    #[serde(default = "d_mode")]
    pub mode: ModeSelection,
    #[serde(default = "d_gth")]
    pub g_th: f64,
    #[serde(default = "d_gamma")]
    pub gamma: f64,
    #[serde(default = "d_sd")]
    pub sigma_delta: f64,
    #[serde(default = "d_land")]
    pub landscape: LandscapeKind,
    #[serde(default = "d_mod")]
    pub modulation: Modulation,
    #[serde(default)]
    pub dataset_path: Option<PathBuf>,
    #[serde(default = "d_out")]
    pub output_dir: PathBuf,
    /// Quadratic landscape: samples generated per device.
    #[serde(default = "d_spd")]
    pub samples_per_device: usize,
    /// Logistic landscape: ℓ2 penalty.
    #[serde(default = "d_lambda")]
    pub lambda: f64,
    /// Extra device counts for an accuracy-vs-K table.
    #[serde(default)]
    pub k_sweep: Vec<usize>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

fn d_k() -> usize {
    100
}
fn d_m() -> usize {
    1000
}
fn d_n() -> usize {
    150
}
fn d_q() -> usize {
    65
}
fn d_snr() -> f64 {
    10.0
}
fn d_mode() -> ModeSelection {
    ModeSelection::All(AllTag::All)
}
fn d_gth() -> f64 {
    1.0
}
fn d_gamma() -> f64 {
    15.0
}
fn d_sd() -> f64 {
    0.15
}
fn d_land() -> LandscapeKind {
    LandscapeKind::Logistic
}
fn d_mod() -> Modulation {
    Modulation::Qam4
}
fn d_out() -> PathBuf {
    PathBuf::from("results")
}
fn d_spd() -> usize {
    200
}
fn d_lambda() -> f64 {
    1e-3
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("all keys have defaults")
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Linear SNR `ρ = P0/(M·σ_z²)`.
    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.k == 0 || self.m == 0 || self.n == 0 || self.q == 0 {
            return bad(format!(
                "K, M, N and q must be ≥ 1 (K={}, M={}, N={}, q={})",
                self.k, self.m, self.n, self.q
            ));
        }
        if self.snr_db.is_nan() {
            return bad("snr_db is NaN".into());
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be > 0, got {}", self.gamma));
        }
        if !(self.g_th > 0.0 && self.g_th.is_finite()) {
            return bad(format!("g_th must be > 0, got {}", self.g_th));
        }
        if !(self.sigma_delta >= 0.0 && self.sigma_delta.is_finite()) {
            return bad(format!("sigma_delta must be ≥ 0, got {}", self.sigma_delta));
        }
        if self.samples_per_device == 0 {
            return bad("samples_per_device must be ≥ 1".into());
        }
        if self.k_sweep.contains(&0) {
            return bad("k_sweep entries must be ≥ 1".into());
        }
        if let Some(p) = &self.dataset_path {
            if !p.is_file() {
                return bad(format!("dataset_path {} does not exist", p.display()));
            }
        }
        Ok(())
    }
}
