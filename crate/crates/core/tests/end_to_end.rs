//! Uplink round trips and training runs through the public API.

use obda_core::aggregate::{air_superpose, cascade, majority_vote, Frame, RoundKeys, Uplink};
use obda_core::channel::{derive_policy, ChannelMode};
use obda_core::harness::{run_feel, ModeSelection, RunConfig, Scenario};
use obda_core::rng::{stream, Purpose};
use obda_core::signal::{Modulation, SignVector};
use rand::Rng;

fn random_signs(k: usize, q: usize, seed: u64) -> Vec<SignVector> {
    (0..k)
        .map(|d| {
            let mut r = stream(seed, Purpose::Batch, &[d as u64]);
            SignVector::new((0..q).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect()).unwrap()
        })
        .collect()
}

fn plain_vote(signs: &[SignVector]) -> Vec<i8> {
    (0..signs[0].len())
        .map(|i| signs.iter().map(|s| s.as_slice()[i] as i32).sum::<i32>().signum() as i8)
        .collect()
}

fn noiseless_awgn(q: usize, m: usize, modulation: Modulation) -> Uplink {
    Uplink {
        policy: derive_policy(m as f64, m, 0.0, ChannelMode::Awgn).unwrap(),
        sigma_z: 0.0,
        csi: None,
        frame: Frame::new(q, m, modulation).unwrap(),
    }
}

#[test]
fn noiseless_vote_matches_counting_for_both_modulations() {
    for (q, m) in [(65, 16), (7, 100), (64, 1), (1000, 33)] {
        let signs = random_signs(11, q, q as u64);
        let want = plain_vote(&signs);
        for modulation in [Modulation::Bpsk, Modulation::Qam4] {
            let up = noiseless_awgn(q, m, modulation);
            let blocks = air_superpose(&signs, &up, RoundKeys { seed: 1, round: 0 }).unwrap();
            assert_eq!(blocks.len(), up.frame.ofdm_symbols());
            assert_eq!(majority_vote(&blocks, &up.frame).unwrap().as_slice(), want.as_slice());
        }
    }
}

#[test]
fn qam_and_bpsk_carry_the_same_statistic_up_to_scale() {
    let (q, m) = (65, 8);
    let signs = random_signs(5, q, 2);
    let keys = RoundKeys { seed: 1, round: 3 };
    let bpsk = noiseless_awgn(q, m, Modulation::Bpsk);
    let qam = noiseless_awgn(q, m, Modulation::Qam4);
    let a = cascade(&air_superpose(&signs, &bpsk, keys).unwrap(), &bpsk.frame).unwrap();
    let b = cascade(&air_superpose(&signs, &qam, keys).unwrap(), &qam.frame).unwrap();
    assert_eq!(a.len(), q);
    assert_eq!(b.len(), q);
    for (x, y) in a.iter().zip(&b) {
        assert!((x * std::f64::consts::FRAC_1_SQRT_2 - y).abs() < 1e-12, "{x} {y}");
    }
}

#[test]
fn framing_covers_every_symbol_once() {
    for modulation in [Modulation::Bpsk, Modulation::Qam4] {
        for (q, m) in [(65, 16), (1, 1), (100, 7), (2, 1000)] {
            let f = Frame::new(q, m, modulation).unwrap();
            let mut seen = vec![0; f.channel_symbols()];
            for t in 0..f.ofdm_symbols() {
                for i in f.block_range(t) {
                    assert_eq!(f.position(i), (t, i - t * m));
                    seen[i] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1));
        }
    }
}

fn small_run(seed: u64) -> RunConfig {
    RunConfig {
        seed,
        k: 12,
        m: 16,
        n: 25,
        mode: ModeSelection::One(Scenario::FadingImperfectCsi),
        ..RunConfig::default()
    }
}

#[test]
fn training_is_reproducible_and_seed_sensitive() {
    let a = run_feel(&small_run(4), Scenario::FadingImperfectCsi).unwrap();
    let b = run_feel(&small_run(4), Scenario::FadingImperfectCsi).unwrap();
    let c = run_feel(&small_run(5), Scenario::FadingImperfectCsi).unwrap();
    assert_eq!(a.records, b.records);
    assert_ne!(a.records, c.records);
    assert_eq!(a.records.len(), 25);
    assert!(a.records.iter().all(|r| (0.0..=1.0).contains(&r.trunc_frac) && r.trunc_frac > 0.0));
}

#[test]
fn channel_scenarios_train_the_logistic_model() {
    for s in [Scenario::Noiseless, Scenario::Awgn, Scenario::FadingPerfectCsi] {
        let cfg = RunConfig { n: 60, ..small_run(0) };
        let out = run_feel(&cfg, s).unwrap();
        let rhs = out.summary.bound.expect("bound defined").rhs;
        assert!(out.summary.g_l1_timeavg < rhs, "{s:?}");
        assert!(out.summary.final_accuracy.unwrap() > 0.7, "{s:?}");
    }
}
