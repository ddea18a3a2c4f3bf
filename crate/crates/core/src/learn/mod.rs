//! Loss landscapes, local stochastic gradients and the signSGD update.

mod dataset;
mod landscape;

pub use dataset::{
    bundled_digits, load_delimited, normalize_with_bias, parse_delimited, partition,
    train_test_split, BUNDLED_DIGITS,
};
pub use landscape::{LogisticLandscape, LossLandscape, QuadraticLandscape};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{GradientVector, SignVector};

/// Safety factor applied to empirical gradient-noise estimates.
pub const NOISE_MARGIN: f64 = 1.2;

/// Minimum draws for [`estimate_noise_profile`].
pub const MIN_NOISE_TRIALS: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: i64,
}

/// A device's local data and its mini-batch size `n_b`.
#[derive(Clone, Debug)]
pub struct DeviceDataset {
    samples: Vec<Sample>,
    batch_size: usize,
}

impl DeviceDataset {
    pub fn new(samples: Vec<Sample>, batch_size: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Config("device dataset is empty".into()));
        }
        if batch_size == 0 || batch_size > samples.len() {
            return Err(Error::Config(format!(
                "batch size {batch_size} outside [1, {}]",
                samples.len()
            )));
        }
        Ok(Self {
            samples,
            batch_size,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelState {
    pub w: Vec<f64>,
    pub round: u64,
}

impl ModelState {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("model parameters must be finite".into()));
        }
        Ok(Self { w, round: 0 })
    }
}

/// Mini-batch gradient `(1/n_b)·Σ_{j∈B} ∇f_j(w)` with `B` drawn uniformly
/// without replacement.
pub fn local_gradient<L, R>(
    landscape: &L,
    model: &ModelState,
    dataset: &DeviceDataset,
    rng: &mut R,
) -> Result<GradientVector>
where
    L: LossLandscape + ?Sized,
    R: Rng + ?Sized,
{
    if dataset.is_empty() {
        return Err(Error::Config("device dataset is empty".into()));
    }
    if model.w.len() != landscape.dim() {
        return Err(Error::Dimension {
            what: "model length",
            expected: landscape.dim(),
            actual: model.w.len(),
        });
    }
    let nb = dataset.batch_size;
    let mut g = vec![0.0; landscape.dim()];
    if nb == dataset.len() {
        for s in &dataset.samples {
            landscape.add_sample_gradient(&model.w, s, &mut g);
        }
    } else {
        for j in index::sample(rng, dataset.len(), nb) {
            landscape.add_sample_gradient(&model.w, &dataset.samples[j], &mut g);
        }
    }
    let inv = 1.0 / nb as f64;
    g.iter_mut().for_each(|v| *v *= inv);
    GradientVector::new(g)
}

/// `w ← w − η·v`.
pub fn apply_update(model: &ModelState, v: &SignVector, eta: f64) -> Result<ModelState> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Config(format!("learning rate must be > 0, got {eta}")));
    }
    if v.len() != model.w.len() {
        return Err(Error::Dimension {
            what: "update length",
            expected: model.w.len(),
            actual: v.len(),
        });
    }
    let w = model
        .w
        .iter()
        .zip(v.iter())
        .map(|(w, s)| w - eta * f64::from(s))
        .collect();
    Ok(ModelState {
        w,
        round: model.round + 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperparams {
    pub eta: f64,
    pub batch_size: usize,
    /// `⌈N/γ⌉` exceeded the local dataset size and was clamped.
    pub clamped: bool,
}

/// `n_b = ⌈N/γ⌉` clamped to `[1, D]` and `η = 1/√(‖L‖₁·n_b)`.
pub fn theorem_hyperparams(
    smoothness: &[f64],
    rounds: usize,
    gamma: f64,
    dataset_size: usize,
) -> Result<Hyperparams> {
    let l1: f64 = smoothness.iter().map(|l| l.abs()).sum();
    if !(l1 > 0.0) {
        return Err(Error::DegenerateLandscape("‖L‖₁ = 0".into()));
    }
    if rounds == 0 || !(gamma > 0.0) || dataset_size == 0 {
        return Err(Error::Config(format!(
            "need N ≥ 1, γ > 0 and D ≥ 1 (N={rounds}, γ={gamma}, D={dataset_size})"
        )));
    }
    let wanted = (rounds as f64 / gamma).ceil().max(1.0);
    let clamped = wanted > dataset_size as f64;
    if clamped {
        log::warn!("batch size ⌈N/γ⌉ = {wanted} exceeds local dataset size {dataset_size}; clamping");
    }
    let batch_size = if clamped { dataset_size } else { wanted as usize };
    Ok(Hyperparams {
        eta: 1.0 / (l1 * batch_size as f64).sqrt(),
        batch_size,
        clamped,
    })
}

/// Per-coordinate standard deviations `σ_i` of single-sample gradients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientNoiseProfile {
    pub sigma: Vec<f64>,
}

impl GradientNoiseProfile {
    pub fn l1(&self) -> f64 {
        self.sigma.iter().sum()
    }
}

/// RMS deviation of single-sample gradients (drawn uniformly from `dataset`)
/// around the full gradient, inflated by [`NOISE_MARGIN`].
pub fn estimate_noise_profile<L, R>(
    landscape: &L,
    model: &ModelState,
    dataset: &DeviceDataset,
    trials: usize,
    rng: &mut R,
) -> Result<GradientNoiseProfile>
where
    L: LossLandscape + ?Sized,
    R: Rng + ?Sized,
{
    if trials < MIN_NOISE_TRIALS {
        return Err(Error::Config(format!(
            "noise profile needs at least {MIN_NOISE_TRIALS} trials, got {trials}"
        )));
    }
    let full = landscape.full_gradient(&model.w);
    let mut acc = vec![0.0; full.len()];
    for _ in 0..trials {
        let s = &dataset.samples[rng.random_range(0..dataset.len())];
        let g = landscape.sample_gradient(&model.w, s);
        for i in 0..acc.len() {
            acc[i] += (g[i] - full[i]).powi(2);
        }
    }
    Ok(GradientNoiseProfile {
        sigma: acc
            .into_iter()
            .map(|a| NOISE_MARGIN * (a / trials as f64).sqrt())
            .collect(),
    })
}

/// Per-coordinate sample skewness of single-sample gradient noise. A
/// diagnostic for the symmetric-noise assumption; not enforced anywhere.
pub fn gradient_noise_skewness<L, R>(
    landscape: &L,
    model: &ModelState,
    dataset: &DeviceDataset,
    trials: usize,
    rng: &mut R,
) -> Vec<f64>
where
    L: LossLandscape + ?Sized,
    R: Rng + ?Sized,
{
    let q = landscape.dim();
    let draws: Vec<Vec<f64>> = (0..trials)
        .map(|_| landscape.sample_gradient(&model.w, &dataset.samples[rng.random_range(0..dataset.len())]))
        .collect();
    (0..q)
        .map(|i| {
            let n = trials as f64;
            let mean = draws.iter().map(|g| g[i]).sum::<f64>() / n;
            let m2 = draws.iter().map(|g| (g[i] - mean).powi(2)).sum::<f64>() / n;
            let m3 = draws.iter().map(|g| (g[i] - mean).powi(3)).sum::<f64>() / n;
            if m2 > 0.0 {
                m3 / m2.powf(1.5)
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    fn quad(q: usize, n: usize, seed: u64) -> QuadraticLandscape {
        QuadraticLandscape::synthetic(q, n, &mut stream(seed, Purpose::Dataset, &[])).unwrap()
    }

    #[test]
    fn full_batch_gradient_is_exact() {
        let land = quad(4, 50, 1);
        let ds = DeviceDataset::new(land.samples().to_vec(), 50).unwrap();
        let m = ModelState::new(vec![1.0, 0.0, -2.0, 0.5]).unwrap();
        let g = local_gradient(&land, &m, &ds, &mut stream(0, Purpose::Batch, &[])).unwrap();
        for (a, b) in g.as_slice().iter().zip(land.full_gradient(&m.w)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_quadratic_full_batch_is_w_minus_mean() {
        let samples = vec![
            Sample { features: vec![1.0, 2.0], label: 0 },
            Sample { features: vec![3.0, -2.0], label: 0 },
        ];
        let land = QuadraticLandscape::new(vec![1.0, 1.0], samples.clone()).unwrap();
        let ds = DeviceDataset::new(samples, 2).unwrap();
        let m = ModelState::new(vec![0.5, 0.5]).unwrap();
        let g = local_gradient(&land, &m, &ds, &mut stream(0, Purpose::Batch, &[])).unwrap();
        assert_eq!(g.as_slice(), &[0.5 - 2.0, 0.5]);
    }

    #[test]
    fn minibatch_is_unbiased() {
        let land = quad(3, 40, 2);
        let ds = DeviceDataset::new(land.samples().to_vec(), 5).unwrap();
        let m = ModelState::new(vec![0.3, -0.2, 1.0]).unwrap();
        let full = land.full_gradient(&m.w);
        let mut rng = stream(7, Purpose::Batch, &[]);
        let reps = 10_000;
        let draws: Vec<Vec<f64>> = (0..reps)
            .map(|_| local_gradient(&land, &m, &ds, &mut rng).unwrap().into_inner())
            .collect();
        for i in 0..3 {
            let mean = draws.iter().map(|g| g[i]).sum::<f64>() / reps as f64;
            let var = draws.iter().map(|g| (g[i] - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
            assert!((mean - full[i]).abs() <= 3.0 * (var / reps as f64).sqrt(), "coord {i}");
        }
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(matches!(DeviceDataset::new(vec![], 1), Err(Error::Config(_))));
    }

    #[test]
    fn update_examples() {
        let m = ModelState::new(vec![0.0, 0.0]).unwrap();
        let v = SignVector::new(vec![1, -1]).unwrap();
        let m1 = apply_update(&m, &v, 0.1).unwrap();
        assert_eq!(m1.w, vec![-0.1, 0.1]);
        assert_eq!(m1.round, 1);
        assert!(matches!(apply_update(&m, &v, 0.0), Err(Error::Config(_))));
        assert!(apply_update(&m, &v, -1.0).is_err());
        let m2 = apply_update(&m1, &v.negated(), 0.1).unwrap();
        assert_eq!(m2.w, vec![0.0, 0.0]);
        assert_eq!(m2.round, 2);
    }

    #[test]
    fn hyperparam_examples() {
        let h = theorem_hyperparams(&[1.0, 1.0, 2.0], 100, 1.0, 1000).unwrap();
        assert_eq!(h.batch_size, 100);
        assert!((h.eta - 0.05).abs() < 1e-15);
        assert!(!h.clamped);
        let h = theorem_hyperparams(&[4.0], 100, 100.0, 10).unwrap();
        assert_eq!(h.batch_size, 1);
        assert!((h.eta - 0.5).abs() < 1e-15);
        let h = theorem_hyperparams(&[4.0], 100, 1.0, 10).unwrap();
        assert_eq!((h.batch_size, h.clamped), (10, true));
        assert!(matches!(
            theorem_hyperparams(&[0.0, 0.0], 10, 1.0, 10),
            Err(Error::DegenerateLandscape(_))
        ));
    }

    #[test]
    fn noise_profile_matches_quadratic_spread() {
        let land = quad(4, 2000, 3);
        let ds = DeviceDataset::new(land.samples().to_vec(), 1).unwrap();
        let m = ModelState::new(vec![0.0; 4]).unwrap();
        let p = estimate_noise_profile(&land, &m, &ds, 10_000, &mut stream(3, Purpose::NoiseProfile, &[])).unwrap();
        for (est, exact) in p.sigma.iter().zip(land.sample_sigma()) {
            let ratio = est / NOISE_MARGIN / exact;
            assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
        }
        assert!(estimate_noise_profile(&land, &m, &ds, 29, &mut stream(3, Purpose::NoiseProfile, &[])).is_err());
    }

    #[test]
    fn identical_samples_have_no_noise() {
        let s = Sample { features: vec![1.0, -1.0], label: 0 };
        let land = QuadraticLandscape::new(vec![1.0, 2.0], vec![s.clone(); 10]).unwrap();
        let ds = DeviceDataset::new(vec![s; 10], 2).unwrap();
        let m = ModelState::new(vec![0.3, 0.3]).unwrap();
        let p = estimate_noise_profile(&land, &m, &ds, 50, &mut stream(1, Purpose::NoiseProfile, &[])).unwrap();
        assert_eq!(p.sigma, vec![0.0, 0.0]);
    }

    #[test]
    fn skewness_diagnostic() {
        let land = quad(3, 5000, 5);
        let ds = DeviceDataset::new(land.samples().to_vec(), 1).unwrap();
        let m = ModelState::new(vec![0.0; 3]).unwrap();
        let skew = gradient_noise_skewness(&land, &m, &ds, 10_000, &mut stream(5, Purpose::NoiseProfile, &[]));
        log::info!("quadratic gradient-noise skewness: {skew:?}");
        assert!(skew.iter().all(|s| s.is_finite()));
    }
}
