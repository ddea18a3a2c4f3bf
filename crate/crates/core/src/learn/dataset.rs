//! Delimited-text datasets, splitting and per-device partitioning.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use super::Sample;
use crate::error::{Error, Result};

/// 8×8 handwritten digits (1,797 samples, pixels 0..16), label 1 for digits ≥ 5.
pub const BUNDLED_DIGITS: &str = include_str!("../../data/digits_ge5.csv");

/// Parse one sample per line: comma, semicolon, tab or space separated
/// features followed by an integer label. Blank lines and `#` comments are
/// skipped.
pub fn parse_delimited(text: &str) -> std::result::Result<Vec<Sample>, String> {
    let mut out = Vec::new();
    let mut width = None;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() < 2 {
            return Err(format!("line {}: need at least one feature and a label", ln + 1));
        }
        let (label, feats) = fields.split_last().unwrap();
        let label: i64 = label
            .parse()
            .map_err(|_| format!("line {}: label {label:?} is not an integer", ln + 1))?;
        let features = feats
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("line {}: bad feature {f:?}", ln + 1))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        match width {
            None => width = Some(features.len()),
            Some(w) if w != features.len() => {
                return Err(format!(
                    "line {}: {} features, earlier lines have {w}",
                    ln + 1,
                    features.len()
                ))
            }
            _ => {}
        }
        out.push(Sample { features, label });
    }
    if out.is_empty() {
        return Err("no samples".into());
    }
    Ok(out)
}

pub fn load_delimited(path: &Path) -> Result<Vec<Sample>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Dataset {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    parse_delimited(&text).map_err(|reason| Error::Dataset {
        path: path.to_path_buf(),
        reason,
    })
}

pub fn bundled_digits() -> Vec<Sample> {
    parse_delimited(BUNDLED_DIGITS).expect("bundled dataset is well formed")
}

/// Scale every feature by its maximum magnitude and append a constant 1.
pub fn normalize_with_bias(samples: &mut [Sample]) {
    let q = samples.first().map_or(0, |s| s.features.len());
    let mut scale = vec![0.0f64; q];
    for s in samples.iter() {
        for (m, x) in scale.iter_mut().zip(&s.features) {
            *m = m.max(x.abs());
        }
    }
    for s in samples.iter_mut() {
        for (x, m) in s.features.iter_mut().zip(&scale) {
            if *m > 0.0 {
                *x /= m;
            }
        }
        s.features.push(1.0);
    }
}

/// Shuffle and split off `test_fraction` of the samples as a held-out set.
pub fn train_test_split<R: Rng + ?Sized>(
    mut samples: Vec<Sample>,
    test_fraction: f64,
    rng: &mut R,
) -> (Vec<Sample>, Vec<Sample>) {
    samples.shuffle(rng);
    let n_test = (samples.len() as f64 * test_fraction).round() as usize;
    let train = samples.split_off(n_test);
    (train, samples)
}

/// Shuffle `samples` and deal `⌊n/K⌋` disjoint samples to each of `k` devices.
/// The remainder is dropped so every device holds the same count.
pub fn partition<R: Rng + ?Sized>(
    samples: &[Sample],
    k: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Sample>>> {
    let d = samples.len() / k.max(1);
    if k == 0 || d == 0 {
        return Err(Error::Config(format!(
            "cannot give each of {k} devices at least one of {} samples",
            samples.len()
        )));
    }
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    idx.shuffle(rng);
    Ok(idx
        .chunks_exact(d)
        .take(k)
        .map(|c| c.iter().map(|&i| samples[i].clone()).collect())
        .collect())
}
