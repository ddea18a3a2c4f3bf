//! Over-the-air superposition and majority-vote decoding.
//!
//! Each device maps its `q` signs onto sub-channel symbols (one per BPSK
//! symbol, two per 4-QAM symbol), cut into `N_s = ⌈symbols / M⌉` OFDM symbols.
//! Symbol `t`, sub-channel `m` carries flat index `i = t·M + m`. The receiver
//! sees `Σ_k h_k·p_k·x_k + z` per sub-channel with `z ~ CN(0, σ_z²)` and decides
//! each sign from the real (and, for 4-QAM, imaginary) part.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{
    inversion_coefficient, sample_channel, ChannelRealization, CsiErrorModel, PowerPolicy,
};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::signal::{qam_encode, sign_of, GradientVector, Modulation, SignVector};

/// Received sub-channel values for one OFDM symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregatedBlock {
    pub values: Vec<Complex64>,
    /// Number of non-truncated devices per sub-channel. Diagnostic only.
    pub contributing_counts: Vec<u32>,
}

/// Layout of `q` signs over OFDM symbols of `m` sub-channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frame {
    pub q: usize,
    pub m: usize,
    pub modulation: Modulation,
}

impl Frame {
    pub fn new(q: usize, m: usize, modulation: Modulation) -> Result<Self> {
        if q == 0 || m == 0 {
            return Err(Error::Framing(format!("need q ≥ 1 and M ≥ 1, got q={q}, M={m}")));
        }
        Ok(Self { q, m, modulation })
    }

    /// Sub-channel symbols each device sends per round.
    pub fn channel_symbols(&self) -> usize {
        self.modulation.symbols_for(self.q)
    }

    /// `N_s`, the number of OFDM symbols per round.
    pub fn ofdm_symbols(&self) -> usize {
        self.channel_symbols().div_ceil(self.m)
    }

    /// Range of flat symbol indices carried by OFDM symbol `t`.
    pub fn block_range(&self, t: usize) -> std::ops::Range<usize> {
        let start = t * self.m;
        start..(start + self.m).min(self.channel_symbols())
    }

    /// `(t, m)` position of flat symbol index `i`.
    pub fn position(&self, i: usize) -> (usize, usize) {
        (i / self.m, i % self.m)
    }
}

/// Map signs to sub-channel symbols: BPSK on the real axis, or unit-energy 4-QAM.
pub fn modulate(s: &SignVector, modulation: Modulation) -> Vec<Complex64> {
    match modulation {
        Modulation::Bpsk => s.iter().map(|v| Complex64::new(f64::from(v), 0.0)).collect(),
        Modulation::Qam4 => qam_encode(s).symbols,
    }
}

fn complex_noise<R: Rng + ?Sized>(sigma_z: f64, rng: &mut R) -> Complex64 {
    if sigma_z == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (sigma_z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Superpose one OFDM symbol. `device_symbols[k]` holds device `k`'s symbols
/// for the used sub-channels; all devices must send the same count.
pub fn superpose_block<R: Rng + ?Sized>(
    device_symbols: &[&[Complex64]],
    channel: &ChannelRealization,
    policy: &PowerPolicy,
    sigma_z: f64,
    rng: &mut R,
) -> Result<AggregatedBlock> {
    if device_symbols.len() != channel.devices() {
        return Err(Error::Dimension {
            what: "devices in transmission vs channel",
            expected: channel.devices(),
            actual: device_symbols.len(),
        });
    }
    if !(sigma_z >= 0.0) {
        return Err(Error::InvalidInput(format!("noise level must be ≥ 0, got {sigma_z}")));
    }
    let used = device_symbols.first().map_or(0, |s| s.len());
    if let Some(bad) = device_symbols.iter().find(|s| s.len() != used) {
        return Err(Error::Dimension {
            what: "symbols per device",
            expected: used,
            actual: bad.len(),
        });
    }
    if used > channel.subchannels() {
        return Err(Error::Dimension {
            what: "symbols per OFDM block",
            expected: channel.subchannels(),
            actual: used,
        });
    }
    let mut values = vec![Complex64::new(0.0, 0.0); used];
    let mut counts = vec![0u32; used];
    for (k, symbols) in device_symbols.iter().enumerate() {
        for (m, &x) in symbols.iter().enumerate() {
            let p = inversion_coefficient(channel.h_hat(k, m), policy);
            if p.norm_sqr() > 0.0 {
                values[m] += channel.h(k, m) * p * x;
                counts[m] += 1;
            }
        }
    }
    for v in &mut values {
        *v += complex_noise(sigma_z, rng);
    }
    Ok(AggregatedBlock {
        values,
        contributing_counts: counts,
    })
}

/// Uplink physical-layer settings shared by all devices.
#[derive(Clone, Copy, Debug)]
pub struct Uplink {
    pub policy: PowerPolicy,
    pub sigma_z: f64,
    pub csi: Option<CsiErrorModel>,
    pub frame: Frame,
}

/// Keys for the per-symbol channel and noise streams of one round.
#[derive(Clone, Copy, Debug)]
pub struct RoundKeys {
    pub seed: u64,
    pub round: u64,
}

impl RoundKeys {
    fn channel(&self, t: usize) -> rng::StreamRng {
        rng::stream(self.seed, Purpose::Channel, &[self.round, t as u64])
    }

    fn noise(&self, t: usize) -> rng::StreamRng {
        rng::stream(self.seed, Purpose::Noise, &[self.round, t as u64])
    }
}

/// Transmit every device's sign vector over all `N_s` OFDM symbols of a round.
pub fn air_superpose(
    signs: &[SignVector],
    uplink: &Uplink,
    keys: RoundKeys,
) -> Result<Vec<AggregatedBlock>> {
    let frame = uplink.frame;
    if signs.is_empty() {
        return Err(Error::InvalidInput("no devices transmitting".into()));
    }
    if let Some(bad) = signs.iter().find(|s| s.len() != frame.q) {
        return Err(Error::Dimension {
            what: "sign vector length",
            expected: frame.q,
            actual: bad.len(),
        });
    }
    let streams: Vec<Vec<Complex64>> = signs.iter().map(|s| modulate(s, frame.modulation)).collect();
    transmit(&streams, uplink, keys)
}

fn transmit(
    streams: &[Vec<Complex64>],
    uplink: &Uplink,
    keys: RoundKeys,
) -> Result<Vec<AggregatedBlock>> {
    let frame = uplink.frame;
    let k = streams.len();
    (0..frame.ofdm_symbols())
        .map(|t| {
            let range = frame.block_range(t);
            let mut ch_rng = keys.channel(t);
            let channel = sample_channel(
                k,
                range.len(),
                &uplink.policy,
                uplink.csi.as_ref(),
                &mut ch_rng,
            )?;
            let slices: Vec<&[Complex64]> = streams.iter().map(|s| &s[range.clone()]).collect();
            superpose_block(&slices, &channel, &uplink.policy, uplink.sigma_z, &mut keys.noise(t))
        })
        .collect()
}

/// Cascade the blocks and read the real decision statistic of every sign.
pub fn cascade(blocks: &[AggregatedBlock], frame: &Frame) -> Result<Vec<f64>> {
    let received: usize = blocks.iter().map(|b| b.values.len()).sum();
    if received != frame.channel_symbols() {
        return Err(Error::Framing(format!(
            "received {received} symbols, frame expects {}",
            frame.channel_symbols()
        )));
    }
    let symbols = blocks.iter().flat_map(|b| b.values.iter());
    let mut out: Vec<f64> = match frame.modulation {
        Modulation::Bpsk => symbols.map(|z| z.re).collect(),
        Modulation::Qam4 => symbols.flat_map(|z| [z.re, z.im]).collect(),
    };
    out.truncate(frame.q);
    Ok(out)
}

/// Majority-vote decoder: elementwise sign of the cascaded statistic.
pub fn majority_vote(blocks: &[AggregatedBlock], frame: &Frame) -> Result<SignVector> {
    let stats = cascade(blocks, frame)?;
    SignVector::new(stats.into_iter().map(sign_of).collect())
}

/// Uncoded analog aggregation baseline. All devices scale by a common factor
/// `c = 1 / max_k rms(g_k)` so none exceeds unit average power; the receiver
/// divides the real part by `K·√ρ0·c`.
pub fn analog_superpose(
    gradients: &[GradientVector],
    uplink: &Uplink,
    keys: RoundKeys,
) -> Result<GradientVector> {
    let frame = Frame::new(uplink.frame.q, uplink.frame.m, Modulation::Bpsk)?;
    if gradients.is_empty() {
        return Err(Error::InvalidInput("no devices transmitting".into()));
    }
    if let Some(bad) = gradients.iter().find(|g| g.len() != frame.q) {
        return Err(Error::Dimension {
            what: "gradient length",
            expected: frame.q,
            actual: bad.len(),
        });
    }
    let max_rms = gradients
        .iter()
        .map(|g| (g.as_slice().iter().map(|v| v * v).sum::<f64>() / frame.q as f64).sqrt())
        .fold(0.0, f64::max);
    let c = if max_rms > 0.0 { 1.0 / max_rms } else { 1.0 };
    let streams: Vec<Vec<Complex64>> = gradients
        .iter()
        .map(|g| g.as_slice().iter().map(|&v| Complex64::new(c * v, 0.0)).collect())
        .collect();
    let analog = Uplink { frame, ..*uplink };
    let blocks = transmit(&streams, &analog, keys)?;
    let scale = gradients.len() as f64 * uplink.policy.rho0.sqrt() * c;
    GradientVector::new(cascade(&blocks, &frame)?.into_iter().map(|v| v / scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{derive_policy, ChannelMode};
    use rand::SeedableRng;

    fn signs(v: &[i8]) -> SignVector {
        SignVector::new(v.to_vec()).unwrap()
    }

    fn awgn_uplink(q: usize, m: usize, rho0: f64, sigma_z: f64, modulation: Modulation) -> Uplink {
        Uplink {
            policy: derive_policy(rho0 * m as f64, m, 0.0, ChannelMode::Awgn).unwrap(),
            sigma_z,
            csi: None,
            frame: Frame::new(q, m, modulation).unwrap(),
        }
    }

    #[test]
    fn awgn_direct_sum() {
        // rho0 = 4 → amplitude 2; three devices (+, +, -) sum to 2.
        let policy = derive_policy(4.0, 1, 0.0, ChannelMode::Awgn).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let ch = sample_channel(3, 1, &policy, None, &mut rng).unwrap();
        let x = [
            [Complex64::new(1.0, 0.0)],
            [Complex64::new(1.0, 0.0)],
            [Complex64::new(-1.0, 0.0)],
        ];
        let slices: Vec<&[Complex64]> = x.iter().map(|s| &s[..]).collect();
        let block = superpose_block(&slices, &ch, &policy, 0.0, &mut rng).unwrap();
        assert!((block.values[0].re - 2.0).abs() < 1e-15);
        assert_eq!(block.contributing_counts, vec![3]);
    }

    #[test]
    fn all_truncated_leaves_noise_only() {
        let policy = derive_policy(1.0, 1, 50.0, ChannelMode::FadingPerfectCsi).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let ch = sample_channel(4, 1, &policy, None, &mut rng).unwrap();
        let x = [Complex64::new(1.0, 0.0)];
        let slices = vec![&x[..]; 4];
        let mut noise_rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let block = superpose_block(&slices, &ch, &policy, 1.0, &mut noise_rng).unwrap();
        let mut again = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        assert_eq!(block.contributing_counts, vec![0]);
        assert_eq!(block.values[0], complex_noise(1.0, &mut again));
    }

    #[test]
    fn mismatched_devices_rejected() {
        let policy = derive_policy(1.0, 2, 0.0, ChannelMode::Awgn).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let ch = sample_channel(2, 2, &policy, None, &mut rng).unwrap();
        let x = [Complex64::new(1.0, 0.0)];
        assert!(matches!(
            superpose_block(&[&x[..]], &ch, &policy, 0.0, &mut rng),
            Err(Error::Dimension { .. })
        ));
        let up = awgn_uplink(3, 2, 1.0, 0.0, Modulation::Bpsk);
        let keys = RoundKeys { seed: 0, round: 0 };
        assert!(air_superpose(&[signs(&[1, 1])], &up, keys).is_err());
    }

    #[test]
    fn decoder_examples() {
        let frame = Frame::new(2, 4, Modulation::Bpsk).unwrap();
        let block = AggregatedBlock {
            values: vec![Complex64::new(2.1, 0.3), Complex64::new(-0.4, 9.0)],
            contributing_counts: vec![3, 3],
        };
        assert_eq!(majority_vote(std::slice::from_ref(&block), &frame).unwrap().as_slice(), &[1, -1]);
        let wrong = Frame::new(3, 4, Modulation::Bpsk).unwrap();
        assert!(matches!(majority_vote(&[block], &wrong), Err(Error::Framing(_))));
    }

    #[test]
    fn ties_decode_to_plus_one() {
        let up = awgn_uplink(3, 2, 1.0, 0.0, Modulation::Bpsk);
        let keys = RoundKeys { seed: 3, round: 0 };
        let blocks = air_superpose(&[signs(&[1, -1, 1]), signs(&[-1, 1, 1])], &up, keys).unwrap();
        assert_eq!(majority_vote(&blocks, &up.frame).unwrap().as_slice(), &[1, 1, 1]);
    }

    #[test]
    fn framing_spans_symbols() {
        let frame = Frame::new(7, 3, Modulation::Bpsk).unwrap();
        assert_eq!(frame.ofdm_symbols(), 3);
        assert_eq!(frame.block_range(2), 6..7);
        let idx: Vec<usize> = (0..frame.ofdm_symbols())
            .flat_map(|t| frame.block_range(t))
            .collect();
        assert_eq!(idx, (0..7).collect::<Vec<_>>());
        for i in 0..7 {
            let (t, m) = frame.position(i);
            assert_eq!(t * 3 + m, i);
        }
        let qam = Frame::new(7, 3, Modulation::Qam4).unwrap();
        assert_eq!(qam.channel_symbols(), 4);
        assert_eq!(qam.ofdm_symbols(), 2);
    }

    #[test]
    fn analog_single_device_is_exact() {
        let up = awgn_uplink(5, 2, 2.0, 0.0, Modulation::Bpsk);
        let g = GradientVector::new(vec![0.5, -1.5, 3.0, 0.0, 2.0]).unwrap();
        let out = analog_superpose(std::slice::from_ref(&g), &up, RoundKeys { seed: 1, round: 0 }).unwrap();
        for (a, b) in out.as_slice().iter().zip(g.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        let same = analog_superpose(&[g.clone(), g.clone(), g.clone()], &up, RoundKeys { seed: 1, round: 0 })
            .unwrap();
        for (a, b) in same.as_slice().iter().zip(g.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
