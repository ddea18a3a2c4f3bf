//! Rayleigh block fading, truncated channel-inversion power control and
//! CSI perturbation.
//!
//! Coefficients are `CN(0, 1)`, so the gain `|h|²` is unit-mean exponential.
//! A device inverts a sub-channel only when its estimated gain reaches the
//! cutoff `g_th`; `ρ0 = P0 / (M·E1(g_th))` then meets the long-term budget
//! `E|p|² = P0/M` with equality, and a parameter survives truncation with
//! probability `α = exp(-g_th)`.

mod csi;
mod ei;

pub use csi::{CsiErrorModel, CsiFamily, MAX_DELTA_TO_SQRT_GTH};
pub use ei::exp_integral_ei;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// Static unit channel, `h ≡ 1`.
    Awgn,
    FadingPerfectCsi,
    FadingImperfectCsi,
}

impl ChannelMode {
    pub fn is_fading(self) -> bool {
        !matches!(self, ChannelMode::Awgn)
    }
}

/// One OFDM symbol's worth of coefficients for `k` devices on `m` sub-channels.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    k: usize,
    m: usize,
    h: Vec<Complex64>,
    h_hat: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn devices(&self) -> usize {
        self.k
    }

    pub fn subchannels(&self) -> usize {
        self.m
    }

    pub fn h(&self, device: usize, sub: usize) -> Complex64 {
        self.h[device * self.m + sub]
    }

    pub fn h_hat(&self, device: usize, sub: usize) -> Complex64 {
        self.h_hat[device * self.m + sub]
    }

    /// True coefficients, row-major by device.
    pub fn true_coefficients(&self) -> &[Complex64] {
        &self.h
    }

    pub fn estimated_coefficients(&self) -> &[Complex64] {
        &self.h_hat
    }
}

/// Draw from `CN(0, 1)`.
pub fn sample_cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn sample_channel<R: Rng + ?Sized>(
    k: usize,
    m: usize,
    policy: &PowerPolicy,
    csi: Option<&CsiErrorModel>,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidInput(format!(
            "channel needs K ≥ 1 and M ≥ 1, got K={k}, M={m}"
        )));
    }
    let h: Vec<Complex64> = match policy.mode {
        ChannelMode::Awgn => vec![Complex64::new(1.0, 0.0); k * m],
        _ => (0..k * m).map(|_| sample_cn01(rng)).collect(),
    };
    let h_hat = match policy.mode {
        ChannelMode::FadingImperfectCsi => {
            let model = csi.ok_or_else(|| {
                Error::Config("imperfect-CSI mode requires a CSI error model".into())
            })?;
            perturb_csi(&h, model, policy, rng)?
        }
        _ => h.clone(),
    };
    Ok(ChannelRealization { k, m, h, h_hat })
}

/// Power-control parameters derived from the budget and cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerPolicy {
    pub p0: f64,
    pub m: usize,
    pub g_th: f64,
    pub rho0: f64,
    pub alpha: f64,
    pub mode: ChannelMode,
}

pub fn derive_policy(p0: f64, m: usize, g_th: f64, mode: ChannelMode) -> Result<PowerPolicy> {
    if !(p0 > 0.0) || !p0.is_finite() {
        return Err(Error::Config(format!("power budget must be positive, got {p0}")));
    }
    if m == 0 {
        return Err(Error::Config("sub-channel count must be at least 1".into()));
    }
    if !(g_th >= 0.0) || !g_th.is_finite() {
        return Err(Error::Config(format!("cutoff threshold must be ≥ 0, got {g_th}")));
    }
    let per_channel = p0 / m as f64;
    match mode {
        ChannelMode::Awgn => Ok(PowerPolicy {
            p0,
            m,
            g_th: 0.0,
            rho0: per_channel,
            alpha: 1.0,
            mode,
        }),
        _ => {
            if g_th == 0.0 {
                return Err(Error::Config(
                    "fading modes need g_th > 0: full channel inversion has unbounded average power"
                        .into(),
                ));
            }
            Ok(PowerPolicy {
                p0,
                m,
                g_th,
                rho0: per_channel / exp_integral_ei(g_th)?,
                alpha: (-g_th).exp(),
                mode,
            })
        }
    }
}

/// Pre-equalizer `p` for an estimated coefficient: `√ρ0·conj(ĥ)/|ĥ|²` above
/// the cutoff, zero below it. Under AWGN there is nothing to invert.
pub fn inversion_coefficient(h_est: Complex64, policy: &PowerPolicy) -> Complex64 {
    let amp = policy.rho0.sqrt();
    if policy.mode == ChannelMode::Awgn {
        return Complex64::new(amp, 0.0);
    }
    let gain = h_est.norm_sqr();
    if gain >= policy.g_th && gain > 0.0 {
        h_est.conj() * (amp / gain)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

pub fn perturb_csi<R: Rng + ?Sized>(
    h: &[Complex64],
    model: &CsiErrorModel,
    policy: &PowerPolicy,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    model.check_threshold(policy.g_th)?;
    Ok(h.iter().map(|&x| x + model.sample(rng)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerCheck {
    /// Monte Carlo estimate of `E|p|²` per sub-channel.
    pub mean_power: f64,
    pub truncation_rate: f64,
    pub trials: u64,
}

const POWER_CHUNK: u64 = 1 << 16;

/// Monte Carlo estimate of the average transmit power per sub-channel.
pub fn empirical_power_check(policy: &PowerPolicy, trials: u64, seed: u64) -> PowerCheck {
    if policy.mode == ChannelMode::Awgn {
        return PowerCheck {
            mean_power: policy.rho0,
            truncation_rate: 0.0,
            trials,
        };
    }
    let chunks = trials.div_ceil(POWER_CHUNK);
    let partial: Vec<(f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = POWER_CHUNK.min(trials - c * POWER_CHUNK);
            let mut rng = rng::stream(seed, Purpose::Power, &[c]);
            let mut power = 0.0;
            let mut truncated = 0u64;
            for _ in 0..n {
                let p = inversion_coefficient(sample_cn01(&mut rng), policy);
                if p.norm_sqr() == 0.0 {
                    truncated += 1;
                }
                power += p.norm_sqr();
            }
            (power, truncated)
        })
        .collect();
    let (power, truncated) = partial
        .iter()
        .fold((0.0, 0u64), |(p, t), &(a, b)| (p + a, t + b));
    PowerCheck {
        mean_power: power / trials as f64,
        truncation_rate: truncated as f64 / trials as f64,
        trials,
    }
}
