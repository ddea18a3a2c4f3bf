//! Exact binomial-weighted sums `Σ_{k=1}^K w(k)·C(K,k)·α^k·(1-α)^(K-k)`.

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn ln_choose(ln_fact: &[f64], n: usize, k: usize) -> f64 {
    ln_fact[n] - ln_fact[k] - ln_fact[n - k]
}

/// Binomial(K, α) probability mass for `k = 0..=K`, via log-factorials.
pub fn binomial_pmf(k_total: usize, alpha: f64) -> Vec<f64> {
    let mut ln_fact = vec![0.0; k_total + 1];
    for i in 1..=k_total {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    (0..=k_total)
        .map(|k| {
            if alpha >= 1.0 {
                return if k == k_total { 1.0 } else { 0.0 };
            }
            if alpha <= 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            let ln = ln_choose(&ln_fact, k_total, k)
                + k as f64 * alpha.ln()
                + (k_total - k) as f64 * (-alpha).ln_1p();
            ln.exp()
        })
        .collect()
}

fn weighted_sum(k_total: usize, alpha: f64, weight: impl Fn(f64) -> f64) -> f64 {
    let pmf = binomial_pmf(k_total, alpha);
    let mut acc = CompensatedSum::default();
    for (k, p) in pmf.iter().enumerate().skip(1) {
        acc.add(weight(k as f64) * p);
    }
    acc.value()
}

/// `f(K, α) = Σ_{k≥1} (1/k)·P(K_i = k)`.
pub fn binom_f(k_total: usize, alpha: f64) -> f64 {
    weighted_sum(k_total, alpha, |k| 1.0 / k)
}

/// `g(K, α) = Σ_{k≥1} (1/√k)·P(K_i = k)`.
pub fn binom_g(k_total: usize, alpha: f64) -> f64 {
    weighted_sum(k_total, alpha, |k| 1.0 / k.sqrt())
}

/// Closed-form upper bound on [`binom_f`]: `2/(Kα)`.
pub fn binom_f_bound(k_total: usize, alpha: f64) -> f64 {
    2.0 / (k_total as f64 * alpha)
}

/// Closed-form upper bound on [`binom_g`]: `√6/√(Kα)`.
pub fn binom_g_bound(k_total: usize, alpha: f64) -> f64 {
    6f64.sqrt() / (k_total as f64 * alpha).sqrt()
}
