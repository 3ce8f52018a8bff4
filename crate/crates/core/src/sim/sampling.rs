//! Binomial/multinomial draws with `u128` trial counts.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};

/// `Bin(n, p)`. Exact for `n ≤ u64::MAX`; beyond that the normal
/// approximation is used, whose error is far below one count.
pub fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u128, p: f64) -> u128 {
    let p = p.clamp(0.0, 1.0);
    if n == 0 || p == 0.0 {
        return 0;
    }
    if p == 1.0 {
        return n;
    }
    if let Ok(n64) = u64::try_from(n) {
        return Binomial::new(n64, p).expect("p in [0,1]").sample(rng) as u128;
    }
    let nf = n as f64;
    let normal = Normal::new(nf * p, (nf * p * (1.0 - p)).sqrt()).expect("finite parameters");
    let v = normal.sample(rng).round().clamp(0.0, nf);
    (v as u128).min(n)
}

/// Multinomial counts for `n` draws over `probs` (need not be normalized).
pub fn multinomial<R: Rng + ?Sized>(rng: &mut R, n: u128, probs: &[f64]) -> Vec<u128> {
    let mut out = vec![0u128; probs.len()];
    let mut left = n;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (k, &p) in probs.iter().enumerate() {
        if left == 0 || mass <= 0.0 {
            break;
        }
        let p = p.max(0.0);
        let c = if k + 1 == probs.len() {
            left
        } else {
            binomial(rng, left, (p / mass).min(1.0))
        };
        out[k] = c;
        left -= c;
        mass -= p;
    }
    // rounding can leave mass ≈ 0 with draws outstanding; give them to the last live cell
    if left > 0 {
        if let Some(k) = probs.iter().rposition(|&p| p > 0.0) {
            out[k] += left;
        }
    }
    out
}

/// Expands counts into a uniformly shuffled list, which has the law of i.i.d. draws.
pub fn expand_shuffled<K: Clone, R: Rng + ?Sized>(rng: &mut R, counts: &[(K, u128)]) -> Vec<K> {
    let total: u128 = counts.iter().map(|(_, c)| c).sum();
    let mut out = Vec::with_capacity(total as usize);
    for (k, c) in counts {
        out.extend(std::iter::repeat_n(k.clone(), *c as usize));
    }
    out.shuffle(rng);
    out
}
