use std::collections::BTreeMap;

use super::empirical::frequencies;
use super::{queries_since, LearnParams, LearnReport, LearnedSpectrum};
use crate::pauli::{count_up_to_weight, star_unchecked, strings_up_to_weight, ChannelFlag, PauliString, SuperopSpectrum};
use crate::sim::sampling::multinomial;
use crate::sim::Oracle;
use crate::{Error, Result, C64};

/// Largest `n` for which probe bases are drawn over all `3^n` strings.
const PROBE_BASIS_CAP: usize = 12;

/// `⌈9^d n^{2d} ln(n/δ)/ε²⌉` before the shot multiplier.
pub fn pauli_probe_count(n: usize, params: &LearnParams) -> f64 {
    let (d, n) = (params.d as f64, n as f64);
    (9f64.powf(d) * n.powf(2.0 * d) / (params.epsilon * params.epsilon) * (n / params.delta).ln()).ceil()
}

/// One probe's contribution to `Φ̃(x)`: `(−1/2)^{|r ⊕ (s⋆x)|}`.
pub fn pauli_estimator_term(s: &PauliString, r: u64, x: &PauliString) -> f64 {
    let k = (r ^ star_unchecked(s.word(), x.word())).count_ones();
    (-0.5f64).powi(k as i32)
}

/// Learns the error rates of a degree-`d` Pauli channel from product-state
/// probes in uniformly random Pauli bases.
///
/// Every rate with `|x| ≤ d` is estimated by the mean of
/// [`pauli_estimator_term`] over all probes; rates above weight `d` are zero.
pub fn learn_pauli_channel<O: Oracle + ?Sized>(oracle: &mut O, params: &LearnParams) -> Result<LearnReport> {
    params.validate()?;
    let n = oracle.n();
    if n > PROBE_BASIS_CAP {
        return Err(Error::CapExceeded {
            what: "uniform probe bases",
            n,
            cap: PROBE_BASIS_CAP,
        });
    }
    let before = oracle.queries();
    let keys_count = count_up_to_weight(n, params.d);
    params.check_keys("Pauli rate keys (strings of weight ≤ d)", keys_count, n)?;
    let keys = strings_up_to_weight(n, params.d);

    let t = params.shots(pauli_probe_count(n, params))?;
    let bases = 3usize.pow(n as u32);
    let per_basis = multinomial(oracle.learner_rng(), t, &vec![1.0; bases]);
    // outcome counts per basis
    let mut tally: Vec<(PauliString, BTreeMap<u64, u128>)> = Vec::new();
    for (b, &count) in per_basis.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let mut word = vec![0u8; n];
        let mut rest = b;
        for w in word.iter_mut().rev() {
            *w = (rest % 3) as u8 + 1;
            rest /= 3;
        }
        let s = PauliString::new(word)?;
        let out: BTreeMap<u64, u128> = oracle.pauli_probe(&s, count)?.into_iter().collect();
        tally.push((s, out));
    }

    let total = t as f64;
    let entries = keys.iter().map(|x| {
        let sum: f64 = tally
            .iter()
            .flat_map(|(s, out)| out.iter().map(move |(&r, &c)| c as f64 * pauli_estimator_term(s, r, x)))
            .sum();
        ((x.clone(), x.clone()), C64::new(sum / total, 0.0))
    });
    let learned = SuperopSpectrum::new(n, entries.collect::<Vec<_>>(), ChannelFlag::Unknown)?;
    Ok(LearnReport {
        algorithm: "learn-pauli-channel".into(),
        params: params.clone(),
        queries: queries_since(oracle, &before),
        threshold: None,
        heavy_set: Vec::new(),
        learned: LearnedSpectrum::Superop(learned),
        errors: None,
        notes: vec![format!("probes {t}"), format!("keys {}", keys.len())],
    })
}

/// Learns Pauli error rates as the empirical distribution of Bell samples of
/// the Choi state, using `⌈(3^d n^d + ln(1/δ))/ε²⌉` samples.
pub fn learn_pauli_channel_entangled<O: Oracle + ?Sized>(oracle: &mut O, params: &LearnParams) -> Result<LearnReport> {
    params.validate()?;
    let n = oracle.n();
    let before = oracle.queries();
    let (d, nf) = (params.d as f64, n as f64);
    let theory = ((3f64.powf(d) * nf.powf(d) + (1.0 / params.delta).ln()) / (params.epsilon * params.epsilon)).ceil();
    let t = params.shots(theory)?;
    let freq = frequencies(oracle.choi_diag(t)?)?;
    let learned = SuperopSpectrum::new(
        n,
        freq.into_iter().map(|(x, f)| ((x.clone(), x), C64::new(f, 0.0))).collect::<Vec<_>>(),
        ChannelFlag::Unknown,
    )?;
    Ok(LearnReport {
        algorithm: "learn-pauli-channel-entangled".into(),
        params: params.clone(),
        queries: queries_since(oracle, &before),
        threshold: None,
        heavy_set: Vec::new(),
        learned: LearnedSpectrum::Superop(learned),
        errors: None,
        notes: vec![format!("Bell samples {t}")],
    })
}
