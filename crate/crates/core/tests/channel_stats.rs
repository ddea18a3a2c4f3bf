//! Distributional checks on the simulated channel.

use num_complex::Complex64;
use obda_core::aggregate::superpose_block;
use obda_core::channel::{derive_policy, sample_channel, sample_cn01, ChannelMode, CsiErrorModel};
use obda_core::rng::{stream, Purpose};

#[test]
fn channel_gain_is_unit_exponential() {
    let mut rng = stream(3, Purpose::Channel, &[0]);
    let n = 50_000;
    let mut g: Vec<f64> = (0..n).map(|_| sample_cn01(&mut rng).norm_sqr()).collect();
    g.sort_by(f64::total_cmp);
    let d = g
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-x).exp();
            (cdf - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - cdf).abs())
        })
        .fold(0.0, f64::max);
    // 1% critical value of the one-sample KS statistic.
    assert!(d < 1.63 / (n as f64).sqrt(), "KS distance {d}");
}

#[test]
fn contributing_devices_are_binomial() {
    let (k, m, g_th) = (40, 64, 0.5);
    let policy = derive_policy(m as f64, m, g_th, ChannelMode::FadingPerfectCsi).unwrap();
    let alpha = policy.alpha;
    let ones = vec![Complex64::new(1.0, 0.0); m];
    let slices: Vec<&[Complex64]> = (0..k).map(|_| ones.as_slice()).collect();
    let mut counts = Vec::new();
    for r in 0..200 {
        let mut ch = stream(9, Purpose::Channel, &[r]);
        let channel = sample_channel(k, m, &policy, None, &mut ch).unwrap();
        let block = superpose_block(&slices, &channel, &policy, 0.0, &mut stream(9, Purpose::Noise, &[r])).unwrap();
        counts.extend(block.contributing_counts.iter().map(|&c| c as f64));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let (mu, v) = (k as f64 * alpha, k as f64 * alpha * (1.0 - alpha));
    assert!((mean - mu).abs() < 4.0 * (v / n).sqrt(), "mean {mean} vs {mu}");
    assert!((var / v - 1.0).abs() < 0.05, "variance {var} vs {v}");
}

#[test]
fn perfect_inversion_gives_real_unit_gain() {
    let (k, m) = (8, 32);
    let policy = derive_policy(m as f64, m, 0.3, ChannelMode::FadingPerfectCsi).unwrap();
    let mut rng = stream(1, Purpose::Channel, &[]);
    let ch = sample_channel(k, m, &policy, None, &mut rng).unwrap();
    let on = vec![Complex64::new(1.0, 0.0); m];
    let off = vec![Complex64::new(0.0, 0.0); m];
    for d in 0..k {
        let single: Vec<&[Complex64]> =
            (0..k).map(|j| if j == d { on.as_slice() } else { off.as_slice() }).collect();
        let b = superpose_block(&single, &ch, &policy, 0.0, &mut rng).unwrap();
        for (s, v) in b.values.iter().enumerate() {
            let expect = if ch.h(d, s).norm_sqr() >= 0.3 { policy.rho0.sqrt() } else { 0.0 };
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn imperfect_csi_keeps_effective_gain_positive() {
    let (k, m) = (50, 100);
    let policy = derive_policy(m as f64, m, 1.0, ChannelMode::FadingImperfectCsi).unwrap();
    let csi = CsiErrorModel::uniform(0.15).unwrap();
    let mut rng = stream(4, Purpose::Channel, &[]);
    let ch = sample_channel(k, m, &policy, Some(&csi), &mut rng).unwrap();
    for d in 0..k {
        for s in 0..m {
            let (h, hh) = (ch.h(d, s), ch.h_hat(d, s));
            assert!((h - hh).norm() <= csi.delta_max() + 1e-12);
            if hh.norm_sqr() >= 1.0 {
                assert!((h / hh).re > 0.0);
            }
        }
    }
}
