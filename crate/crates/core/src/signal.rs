//! Gradient and sign vectors, one-bit quantization and the 4-QAM pairing.
//!
//! Signs are carried as `i8` values that are always `+1` or `-1`. Under 4-QAM,
//! sign `2j` (0-based) rides the real axis of symbol `j` and sign `2j + 1` the
//! imaginary axis, i.e. odd coefficients (1-based) go real and even ones go
//! imaginary. An odd-length vector gets one `+1` pad on the last imaginary slot.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real-valued gradient (or parameter) vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientVector(Vec<f64>);

impl GradientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "gradient entry {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn zeros(q: usize) -> Self {
        Self(vec![0.0; q])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for GradientVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Vector whose entries are exactly `+1` or `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(i) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput(format!(
                "sign entry {i} is {}, expected +1 or -1",
                signs[i]
            )));
        }
        Ok(Self(signs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        self.0.iter().copied()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| f64::from(s)).collect()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&s| -s).collect())
    }
}

/// Sign with the tie rule `sign(0) = +1`.
#[inline]
pub fn sign_of(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

pub fn sign_quantize(g: &[f64]) -> Result<SignVector> {
    if let Some(i) = g.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("gradient entry {i} is not finite")));
    }
    Ok(SignVector(g.iter().map(|&x| sign_of(x)).collect()))
}

pub fn l1_norm(g: &[f64]) -> f64 {
    g.iter().map(|v| v.abs()).sum()
}

/// Per-sign modulation on each OFDM sub-channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    /// One sign per sub-channel on the real axis.
    Bpsk,
    /// Two signs per sub-channel, one per quadrature axis.
    Qam4,
}

impl Modulation {
    /// Sub-channel symbols needed to carry `q` signs.
    pub fn symbols_for(self, q: usize) -> usize {
        match self {
            Modulation::Bpsk => q,
            Modulation::Qam4 => q.div_ceil(2),
        }
    }
}

/// Unit-energy 4-QAM symbols carrying a sign vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QamSymbolBlock {
    pub symbols: Vec<Complex64>,
    /// Set when the source length was odd and the last imaginary slot is padding.
    pub padded: bool,
}

pub fn qam_encode(s: &SignVector) -> QamSymbolBlock {
    let signs = s.as_slice();
    let symbols = signs
        .chunks(2)
        .map(|pair| {
            let re = f64::from(pair[0]);
            let im = pair.get(1).map_or(1.0, |&v| f64::from(v));
            Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        })
        .collect();
    QamSymbolBlock {
        symbols,
        padded: signs.len() % 2 == 1,
    }
}

pub fn qam_decode(b: &QamSymbolBlock) -> Result<SignVector> {
    let axis = |v: f64, what: &str, j: usize| -> Result<i8> {
        if (v.abs() - FRAC_1_SQRT_2).abs() > 1e-12 {
            return Err(Error::Decode(format!(
                "symbol {j} {what} part {v} is not ±1/√2"
            )));
        }
        Ok(sign_of(v))
    };
    if b.symbols.is_empty() && b.padded {
        return Err(Error::Decode("pad flag set on an empty block".into()));
    }
    let mut out = Vec::with_capacity(2 * b.symbols.len());
    for (j, z) in b.symbols.iter().enumerate() {
        out.push(axis(z.re, "real", j)?);
        let im = axis(z.im, "imaginary", j)?;
        let last = j + 1 == b.symbols.len();
        if last && b.padded {
            if im != 1 {
                return Err(Error::Decode("pad slot does not carry +1".into()));
            }
        } else {
            out.push(im);
        }
    }
    Ok(SignVector(out))
}
