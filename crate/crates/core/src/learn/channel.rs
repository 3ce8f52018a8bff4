use super::empirical::{frequencies, linf_sample_size};
use super::{queries_since, LearnParams, LearnReport, LearnedSpectrum, ThresholdRule};
use crate::pauli::{ChannelFlag, PauliString, SuperopSpectrum};
use crate::sim::{estimate_channel_coeff_per_test, Oracle};
use crate::{Error, Result, C64};

/// Heavy-set threshold `c` for degree-`d` channels.
pub fn channel_threshold(params: &LearnParams) -> f64 {
    if let Some(c) = params.c_override {
        return c;
    }
    let (d, eps, cst) = (params.d as f64, params.epsilon, params.bh_constant);
    match params.threshold_rule {
        ThresholdRule::Proof => eps.powf(2.0 * d + 2.0) * cst.powf(-d * (d + 1.0)),
        ThresholdRule::Box => eps.powf(4.0 * d + 2.0) * cst.powf(-4.0 * d * d),
    }
}

/// Learns a degree-`d` channel to ℓ2 error `ε`.
///
/// Phase 1 estimates the diagonal `Φ̂(x,x)` to ℓ∞ error `c` from Bell samples
/// of the Choi state and keeps `𝒳_c = {x : freq ≥ c}`. Phase 2 estimates
/// `Φ̂(x,y)` for `x ≤ y` in `𝒳_c` with SWAP tests to error `cε` each and fills
/// `(y,x)` by Hermitian symmetry. The failure probability is split evenly
/// between the phases.
pub fn learn_channel<O: Oracle + ?Sized>(oracle: &mut O, params: &LearnParams) -> Result<LearnReport> {
    params.validate()?;
    let n = oracle.n();
    let before = oracle.queries();
    let c = channel_threshold(params);
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("degenerate threshold c = {c}")));
    }
    let half = params.delta / 2.0;

    let t1 = params.shots(linf_sample_size(c, half) as f64)?;
    let freq = frequencies(oracle.choi_diag(t1)?)?;
    let heavy: Vec<PauliString> = freq
        .iter()
        .filter(|(_, &f)| f >= c)
        .map(|(x, _)| x.clone())
        .collect();

    let k = heavy.len().max(1) as f64;
    // three tests per off-diagonal pair, union bound over |X_c|² coefficients
    let per_test_delta = half / (3.0 * k * k);
    let log_term = 2.0 * (2.0 / per_test_delta).ln();
    let eta_off = c * params.epsilon / (2.0 * 2f64.sqrt());
    let eta_diag = c * params.epsilon;
    let shots_off = params.shots(log_term / (eta_off * eta_off))?;
    let shots_diag = params.shots(log_term / (eta_diag * eta_diag))?;

    let mut entries: Vec<((PauliString, PauliString), C64)> = Vec::new();
    for (i, x) in heavy.iter().enumerate() {
        for y in &heavy[i..] {
            if x == y {
                let v = estimate_channel_coeff_per_test(oracle, x, x, shots_diag)?;
                entries.push(((x.clone(), x.clone()), C64::new(v.re, 0.0)));
            } else {
                let v = estimate_channel_coeff_per_test(oracle, x, y, shots_off)?;
                entries.push(((x.clone(), y.clone()), v));
                entries.push(((y.clone(), x.clone()), v.conj()));
            }
        }
    }
    let learned = SuperopSpectrum::new(n, entries, ChannelFlag::Unknown)?;
    Ok(LearnReport {
        algorithm: "learn-channel".into(),
        params: params.clone(),
        queries: queries_since(oracle, &before),
        threshold: Some(c),
        heavy_set: heavy.iter().map(|x| x.to_string()).collect(),
        learned: LearnedSpectrum::Superop(learned),
        errors: None,
        notes: vec![
            format!("diagonal samples {t1}"),
            format!("shots per diagonal test {shots_diag}"),
            format!("shots per off-diagonal test {shots_off}"),
        ],
    })
}
