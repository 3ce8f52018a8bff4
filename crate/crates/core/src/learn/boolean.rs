use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{queries_since, LearnParams, LearnReport, LearnedSpectrum};
use crate::pauli::{BooleanSpectrum, Subset};
use crate::sim::{subset_of_sector, ExampleBatch, Oracle};
use crate::{Error, Result};

/// Estimates closer than this to a grid midpoint count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BooleanMode {
    /// Uniform classical examples only.
    Classical,
    /// Fourier sampling for the support, then classical estimation on it.
    Quantum,
}

impl std::str::FromStr for BooleanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(BooleanMode::Classical),
            "quantum" => Ok(BooleanMode::Quantum),
            _ => Err(Error::InvalidParams(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rounded {
    pub value: f64,
    /// The estimate sat on a midpoint and was rounded toward zero.
    pub tie: bool,
}

/// Nearest point of `2^{1−d}ℤ`; midpoints go to the smaller magnitude.
pub fn round_to_grid(estimate: f64, d: usize) -> Rounded {
    let step = 2f64.powi(1 - d as i32);
    let k = estimate / step;
    let frac = k - k.trunc();
    let tie = (frac.abs() - 0.5).abs() < TIE_TOL;
    let m = if tie { k.trunc() } else { k.round() };
    Rounded { value: m * step, tie }
}

fn subsets_up_to(n: usize, d: usize, out: &mut Vec<Subset>) {
    fn rec(start: usize, n: usize, left: usize, cur: u64, out: &mut Vec<Subset>) {
        out.push(Subset(cur));
        if left == 0 {
            return;
        }
        for i in start..n {
            rec(i + 1, n, left - 1, cur | 1 << i, out);
        }
    }
    rec(0, n, d, 0, out);
}

fn binom_sum(n: usize, d: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for i in 0..=d.min(n) {
        total += c;
        c = c * (n - i) as u128 / (i as u128 + 1);
    }
    total
}

/// `(1/T) Σ f(x) χ_s(x)` over a batch of examples.
fn estimate(batch: &ExampleBatch, s: Subset, total: f64) -> f64 {
    batch.iter().map(|(x, fx, c)| fx * s.character(*x) * *c as f64).sum::<f64>() / total
}

fn estimate_and_round(batch: &ExampleBatch, keys: &[Subset], d: usize, notes: &mut Vec<String>) -> Vec<(Subset, f64)> {
    let total: f64 = batch.iter().map(|(_, _, c)| *c as f64).sum();
    let mut out = Vec::new();
    for &s in keys {
        let e = estimate(batch, s, total);
        let r = round_to_grid(e, d);
        if r.tie {
            notes.push(format!("rounding tie at {:?}: estimate {e} rounded to {}", s, r.value));
        }
        if r.value != 0.0 {
            out.push((s, r.value));
        }
    }
    out
}

/// Exact learning of a `±1`-valued degree-`d` function by rounding estimated
/// coefficients to the `2^{1−d}` grid.
pub fn learn_boolean_exact<O: Oracle + ?Sized>(
    oracle: &mut O,
    params: &LearnParams,
    mode: BooleanMode,
) -> Result<LearnReport> {
    params.validate()?;
    let n = oracle.n();
    let d = params.d;
    let before = oracle.queries();
    let four_d = 4f64.powi(d as i32);
    let mut notes = Vec::new();

    let (keys, delta_est) = match mode {
        BooleanMode::Classical => {
            let count = binom_sum(n, d);
            params.check_keys("Boolean keys of weight ≤ d", count, n)?;
            let mut keys = Vec::with_capacity(count as usize);
            subsets_up_to(n, d, &mut keys);
            keys.sort();
            (keys, params.delta)
        }
        BooleanMode::Quantum => {
            let dp = params.delta / 3.0;
            let support_max = 4f64.powi(d as i32 - 1);
            let p_min = 4f64.powi(1 - d as i32);
            let needed = ((support_max / dp).ln() / -(1.0 - p_min).ln()).ceil().max(1.0);
            let l = (2.0 / dp).ln();
            let u = (l / 2.0).sqrt() + (l / 2.0 + 2.0 * needed).sqrt();
            let attempts = params.shots((u * u).ceil())?;
            let batch = oracle.fourier_sample(attempts)?;
            let accepted: u128 = batch.counts.iter().map(|(_, c)| c).sum();
            notes.push(format!("Fourier attempts {attempts}, accepted {accepted}, needed {needed}"));
            let keys: BTreeSet<Subset> = batch.counts.iter().map(|(s, _)| *s).collect();
            (keys.into_iter().collect(), dp)
        }
    };

    let t = params.shots(2.0 * four_d * (2.0 * keys.len().max(1) as f64 / delta_est).ln())?;
    let batch = oracle.classical_examples(t)?;
    notes.push(format!("classical examples {t}"));
    let coeffs = estimate_and_round(&batch, &keys, d, &mut notes);
    let learned = BooleanSpectrum::new(n, coeffs)?;
    Ok(LearnReport {
        algorithm: format!(
            "learn-boolean-{}",
            match mode {
                BooleanMode::Classical => "classical",
                BooleanMode::Quantum => "quantum",
            }
        ),
        params: params.clone(),
        queries: queries_since(oracle, &before),
        threshold: Some(2f64.powi(1 - d as i32)),
        heavy_set: keys.iter().map(|s| s.to_digits(n)).collect(),
        learned: LearnedSpectrum::Boolean(learned),
        errors: None,
        notes,
    })
}

/// Learns a bounded degree-`d` function `p : {−1,1}^n → [−1,1]` to ℓ2² error
/// `ε²`.
///
/// Phase 1 Bell-samples the Choi state of the block encoding `U_p` and keeps
/// the subsets seen in the `{3}×{0,3}^n` sector. Phase 2 estimates those
/// coefficients from classical examples to error `b`.
pub fn learn_bounded_poly<O: Oracle + ?Sized>(oracle: &mut O, params: &LearnParams) -> Result<LearnReport> {
    params.validate()?;
    let n = oracle.n();
    let before = oracle.queries();
    let (d, eps, delta) = (params.d as f64, params.epsilon, params.delta);
    let a = params
        .c_override
        .unwrap_or_else(|| eps.powf(d + 1.0) * params.bh_constant.powf(-d.powf(1.5) * d.ln().sqrt()));
    let log_a = (2.0 / (delta * a * a)).ln();
    let t1_theory = log_a / (a * a);
    let t1 = params.shots(t1_theory)?;
    let b_sq = eps * eps * a * a / log_a;
    let t2 = params.shots(2.0 * (2.0 * t1_theory / delta).ln() / b_sq)?;

    let mut notes = Vec::new();
    let mut support: BTreeSet<Subset> = BTreeSet::new();
    let mut discarded = 0u128;
    for (x, c) in oracle.block_encoding_cj(t1)? {
        match subset_of_sector(&x) {
            Some(s) => {
                support.insert(s);
            }
            None => discarded += c,
        }
    }
    notes.push(format!("block-encoding samples {t1}, discarded outside sector {discarded}"));
    let batch = oracle.classical_examples(t2)?;
    notes.push(format!("classical examples {t2}"));
    let total = t2 as f64;
    let keys: Vec<Subset> = support.into_iter().collect();
    let coeffs: Vec<(Subset, f64)> = keys.iter().map(|&s| (s, estimate(&batch, s, total))).collect();
    let learned = BooleanSpectrum::new(n, coeffs)?;
    Ok(LearnReport {
        algorithm: "learn-bounded-poly".into(),
        params: params.clone(),
        queries: queries_since(oracle, &before),
        threshold: Some(a),
        heavy_set: keys.iter().map(|s| s.to_digits(n)).collect(),
        learned: LearnedSpectrum::Boolean(learned),
        errors: None,
        notes,
    })
}
