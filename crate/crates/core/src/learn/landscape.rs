//! Loss landscapes with known smoothness and lower bound.

use rand::Rng;
use rand_distr::StandardNormal;

use super::Sample;
use crate::error::{Error, Result};

/// Empirical-risk objective `F(w) = (1/n)·Σ_j f_j(w)` over a fixed training set.
pub trait LossLandscape: Send + Sync {
    fn dim(&self) -> usize;

    /// Training samples defining `F`.
    fn samples(&self) -> &[Sample];

    fn sample_loss(&self, w: &[f64], sample: &Sample) -> f64;

    /// Add `∇f_j(w)` to `out`.
    fn add_sample_gradient(&self, w: &[f64], sample: &Sample, out: &mut [f64]);

    /// Per-coordinate smoothness constants `L`.
    fn smoothness(&self) -> &[f64];

    /// `F*`, a lower bound on the loss.
    fn lower_bound(&self) -> f64;

    fn loss(&self, w: &[f64]) -> f64 {
        let s = self.samples();
        s.iter().map(|x| self.sample_loss(w, x)).sum::<f64>() / s.len() as f64
    }

    fn sample_gradient(&self, w: &[f64], sample: &Sample) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.add_sample_gradient(w, sample, &mut g);
        g
    }

    fn full_gradient(&self, w: &[f64]) -> Vec<f64> {
        let s = self.samples();
        let mut g = vec![0.0; self.dim()];
        for x in s {
            self.add_sample_gradient(w, x, &mut g);
        }
        let inv = 1.0 / s.len() as f64;
        g.iter_mut().for_each(|v| *v *= inv);
        g
    }
}

fn check_samples(samples: &[Sample], dim: usize) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::Config("landscape needs at least one sample".into()));
    }
    if let Some(bad) = samples.iter().find(|s| s.features.len() != dim) {
        return Err(Error::Dimension {
            what: "sample feature length",
            expected: dim,
            actual: bad.features.len(),
        });
    }
    Ok(())
}

/// Separable quadratic `f_j(w) = ½·Σ_i L_i·(w_i − x_ji)²`.
///
/// `F` is minimised at the sample mean `x̄`, with
/// `F* = ½·Σ_i L_i·Var_j(x_ji)` and the single-sample gradient noise
/// `σ_i = L_i·std_j(x_ji)`.
#[derive(Clone, Debug)]
pub struct QuadraticLandscape {
    curvature: Vec<f64>,
    samples: Vec<Sample>,
    mean: Vec<f64>,
    var: Vec<f64>,
}

impl QuadraticLandscape {
    pub fn new(curvature: Vec<f64>, samples: Vec<Sample>) -> Result<Self> {
        let q = curvature.len();
        if q == 0 || curvature.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::Config("curvatures must be finite and ≥ 0".into()));
        }
        check_samples(&samples, q)?;
        let n = samples.len() as f64;
        let mut mean = vec![0.0; q];
        for s in &samples {
            for (m, x) in mean.iter_mut().zip(&s.features) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; q];
        for s in &samples {
            for i in 0..q {
                let d = s.features[i] - mean[i];
                var[i] += d * d;
            }
        }
        var.iter_mut().for_each(|v| *v /= n);
        Ok(Self {
            curvature,
            samples,
            mean,
            var,
        })
    }

    /// `n` samples with `x_ji ~ N(0, 1)` and curvatures spread evenly over
    /// `[0.5, 2]`.
    pub fn synthetic<R: Rng + ?Sized>(q: usize, n: usize, rng: &mut R) -> Result<Self> {
        if q == 0 || n == 0 {
            return Err(Error::Config("synthetic quadratic needs q ≥ 1 and n ≥ 1".into()));
        }
        let curvature = (0..q)
            .map(|i| if q == 1 { 1.0 } else { 0.5 + 1.5 * i as f64 / (q - 1) as f64 })
            .collect();
        let samples = (0..n)
            .map(|_| Sample {
                features: (0..q).map(|_| rng.sample(StandardNormal)).collect(),
                label: 0,
            })
            .collect();
        Self::new(curvature, samples)
    }

    /// Minimiser `x̄` of `F`.
    pub fn minimizer(&self) -> &[f64] {
        &self.mean
    }

    /// Per-coordinate standard deviation of single-sample gradients.
    pub fn sample_sigma(&self) -> Vec<f64> {
        self.curvature
            .iter()
            .zip(&self.var)
            .map(|(l, v)| l * v.sqrt())
            .collect()
    }

    /// Worst-case per-coordinate deviation of a device's sample gradients
    /// from the global gradient: `L_i·max_k √(mean_{j∈D_k}(x_ji − x̄_i)²)`.
    pub fn device_sigma(&self, devices: &[&[Sample]]) -> Vec<f64> {
        let q = self.dim();
        let mut worst = vec![0.0f64; q];
        for d in devices {
            let mut acc = vec![0.0; q];
            for s in d.iter() {
                for ((a, x), m) in acc.iter_mut().zip(&s.features).zip(&self.mean) {
                    *a += (x - m) * (x - m);
                }
            }
            for i in 0..q {
                worst[i] = worst[i].max((acc[i] / d.len().max(1) as f64).sqrt());
            }
        }
        worst.iter().zip(&self.curvature).map(|(s, l)| s * l).collect()
    }
}

impl LossLandscape for QuadraticLandscape {
    fn dim(&self) -> usize {
        self.curvature.len()
    }

    fn samples(&self) -> &[Sample] {
        &self.samples
    }

    fn sample_loss(&self, w: &[f64], sample: &Sample) -> f64 {
        0.5 * self
            .curvature
            .iter()
            .zip(w.iter().zip(&sample.features))
            .map(|(l, (w, x))| l * (w - x) * (w - x))
            .sum::<f64>()
    }

    fn add_sample_gradient(&self, w: &[f64], sample: &Sample, out: &mut [f64]) {
        for i in 0..out.len() {
            out[i] += self.curvature[i] * (w[i] - sample.features[i]);
        }
    }

    fn smoothness(&self) -> &[f64] {
        &self.curvature
    }

    fn lower_bound(&self) -> f64 {
        0.5 * self.curvature.iter().zip(&self.var).map(|(l, v)| l * v).sum::<f64>()
    }

    // Closed forms: faster and exact.
    fn loss(&self, w: &[f64]) -> f64 {
        let dev: f64 = (0..self.dim())
            .map(|i| self.curvature[i] * (w[i] - self.mean[i]).powi(2))
            .sum();
        0.5 * dev + self.lower_bound()
    }

    fn full_gradient(&self, w: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.curvature[i] * (w[i] - self.mean[i]))
            .collect()
    }
}

/// ℓ2-regularised logistic regression on labels `{0, 1}`:
/// `f_j(w) = ln(1 + exp(−y_j·x_jᵀw)) + (λ/2)·‖w‖²` with `y_j = ±1`.
///
/// Smoothness uses `σ' ≤ ¼` and `(xᵀd)² ≤ ‖x‖₁·Σ_i |x_i|·d_i²`, giving
/// `L_i = ¼·max_j(|x_ji|·‖x_j‖₁) + λ`, which bounds every `f_j`.
#[derive(Clone, Debug)]
pub struct LogisticLandscape {
    samples: Vec<Sample>,
    lambda: f64,
    smooth: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn signed_label(label: i64) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `ln(1 + eᵗ)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl LogisticLandscape {
    pub fn new(samples: Vec<Sample>, lambda: f64) -> Result<Self> {
        let q = samples.first().map_or(0, |s| s.features.len());
        if q == 0 {
            return Err(Error::Config("logistic landscape needs non-empty samples".into()));
        }
        check_samples(&samples, q)?;
        if let Some(bad) = samples.iter().find(|s| s.label != 0 && s.label != 1) {
            return Err(Error::Config(format!(
                "logistic landscape needs labels 0/1, found {}",
                bad.label
            )));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("λ must be finite and ≥ 0, got {lambda}")));
        }
        let mut smooth = vec![0.0f64; q];
        for s in &samples {
            let l1: f64 = s.features.iter().map(|x| x.abs()).sum();
            for (li, x) in smooth.iter_mut().zip(&s.features) {
                *li = li.max(x.abs() * l1);
            }
        }
        smooth.iter_mut().for_each(|l| *l = 0.25 * *l + lambda);
        Ok(Self {
            samples,
            lambda,
            smooth,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Fraction of `test` classified correctly by `sign(xᵀw)`.
    pub fn accuracy(&self, w: &[f64], test: &[Sample]) -> f64 {
        if test.is_empty() {
            return 0.0;
        }
        let hits = test
            .iter()
            .filter(|s| (dot(w, &s.features) > 0.0) == (s.label == 1))
            .count();
        hits as f64 / test.len() as f64
    }
}

impl LossLandscape for LogisticLandscape {
    fn dim(&self) -> usize {
        self.smooth.len()
    }

    fn samples(&self) -> &[Sample] {
        &self.samples
    }

    fn sample_loss(&self, w: &[f64], sample: &Sample) -> f64 {
        let y = signed_label(sample.label);
        softplus(-y * dot(w, &sample.features)) + 0.5 * self.lambda * dot(w, w)
    }

    fn add_sample_gradient(&self, w: &[f64], sample: &Sample, out: &mut [f64]) {
        let y = signed_label(sample.label);
        let c = -y * logistic(-y * dot(w, &sample.features));
        for i in 0..out.len() {
            out[i] += c * sample.features[i] + self.lambda * w[i];
        }
    }

    fn smoothness(&self) -> &[f64] {
        &self.smooth
    }

    fn lower_bound(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    fn certificate_holds(land: &dyn LossLandscape, seed: u64, pairs: usize, scale: f64) -> f64 {
        let mut rng = stream(seed, Purpose::Verify, &[]);
        let q = land.dim();
        let l = land.smoothness().to_vec();
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let w: Vec<f64> = (0..q).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
            let w2: Vec<f64> = (0..q).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
            let g = land.full_gradient(&w);
            let d: Vec<f64> = w2.iter().zip(&w).map(|(a, b)| a - b).collect();
            let lhs = (land.loss(&w2) - land.loss(&w) - dot(&g, &d)).abs();
            let rhs = 0.5 * (0..q).map(|i| l[i] * d[i] * d[i]).sum::<f64>();
            worst = worst.max(lhs / rhs);
        }
        worst
    }

    #[test]
    fn quadratic_closed_forms_match_sums() {
        let mut rng = stream(1, Purpose::Dataset, &[]);
        let land = QuadraticLandscape::synthetic(5, 300, &mut rng).unwrap();
        let w = vec![0.3, -1.0, 2.0, 0.0, 0.7];
        let direct: f64 = land.samples().iter().map(|s| land.sample_loss(&w, s)).sum::<f64>() / 300.0;
        assert!((land.loss(&w) - direct).abs() < 1e-12);
        let mut g = vec![0.0; 5];
        for s in land.samples() {
            land.add_sample_gradient(&w, s, &mut g);
        }
        for (a, b) in g.iter().zip(land.full_gradient(&w)) {
            assert!((a / 300.0 - b).abs() < 1e-12);
        }
        assert!((land.loss(land.minimizer()) - land.lower_bound()).abs() < 1e-12);
    }

    #[test]
    fn quadratic_certificate() {
        let mut rng = stream(2, Purpose::Dataset, &[]);
        let land = QuadraticLandscape::synthetic(8, 100, &mut rng).unwrap();
        assert!(certificate_holds(&land, 3, 1000, 2.0) <= 1.0 + 1e-9);
    }

    #[test]
    fn logistic_certificate_and_gradient() {
        let mut rng = stream(4, Purpose::Dataset, &[]);
        let samples: Vec<Sample> = (0..200)
            .map(|j| Sample {
                features: (0..6).map(|_| rng.random_range(-1.0..1.0)).collect(),
                label: (j % 2) as i64,
            })
            .collect();
        let land = LogisticLandscape::new(samples, 1e-3).unwrap();
        assert!(certificate_holds(&land, 5, 1000, 1.5) <= 1.0);
        let w = vec![0.2, -0.4, 0.1, 0.9, -1.2, 0.05];
        let g = land.full_gradient(&w);
        for i in 0..6 {
            let h = 1e-6;
            let mut a = w.clone();
            let mut b = w.clone();
            a[i] += h;
            b[i] -= h;
            let fd = (land.loss(&a) - land.loss(&b)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-7, "{i}: {fd} vs {}", g[i]);
        }
        assert!(land.loss(&w) >= land.lower_bound());
    }

    #[test]
    fn logistic_rejects_bad_labels() {
        let s = vec![Sample {
            features: vec![1.0],
            label: 3,
        }];
        assert!(matches!(LogisticLandscape::new(s, 0.0), Err(Error::Config(_))));
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-1000.0) >= 0.0);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
