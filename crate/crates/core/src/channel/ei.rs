//! Exponential integral `E1(x) = ∫_x^∞ exp(-t)/t dt` for real `x > 0`.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 500;

/// `∫_x^∞ exp(-t)/t dt`, accurate to ~1e-15 relative for `x > 0`.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "exponential integral needs a finite x > 0, got {x}"
        )));
    }
    if x <= 1.0 {
        Ok(series(x))
    } else {
        Ok(continued_fraction(x))
    }
}

// -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)
fn series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..MAX_ITER {
        let k = k as f64;
        term *= -x / k;
        let contrib = term / k;
        sum += contrib;
        if contrib.abs() < EPS * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Modified Lentz evaluation of the continued fraction for E1.
fn continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h * (-x).exp()
}
