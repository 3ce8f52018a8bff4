use std::collections::BTreeMap;

use crate::{Error, Result};

/// Relative frequencies of the distinct samples.
pub fn empirical_distribution<K: Ord + Clone>(samples: &[K]) -> Result<BTreeMap<K, f64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("sample list"));
    }
    let mut counts: BTreeMap<K, u128> = BTreeMap::new();
    for s in samples {
        *counts.entry(s.clone()).or_default() += 1;
    }
    frequencies(counts)
}

/// Frequencies from aggregated counts.
pub(crate) fn frequencies<K: Ord>(counts: impl IntoIterator<Item = (K, u128)>) -> Result<BTreeMap<K, f64>> {
    let counts: Vec<(K, u128)> = counts.into_iter().collect();
    let total: u128 = counts.iter().map(|(_, c)| c).sum();
    if total == 0 {
        return Err(Error::EmptyInput("sample list"));
    }
    Ok(counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / total as f64))
        .collect())
}

/// Samples after which every empirical frequency is within `epsilon` of the
/// truth with probability `≥ 1 − delta` (DKW at `ε/2`): `⌈2 ln(2/δ)/ε²⌉`.
pub fn linf_sample_size(epsilon: f64, delta: f64) -> u128 {
    (2.0 * (2.0 / delta).ln() / (epsilon * epsilon)).ceil() as u128
}

/// The ℓ∞ accuracy guaranteed by `samples` draws at confidence `1 − delta`.
pub fn linf_error_bound(samples: u128, delta: f64) -> f64 {
    (2.0 * (2.0 / delta).ln() / samples as f64).sqrt()
}
