use super::empirical::{frequencies, linf_sample_size};
use super::{queries_since, LearnParams, LearnReport, LearnedSpectrum};
use crate::pauli::{OperatorSpectrum, PauliString};
use crate::sim::{hadamard_test, Oracle, Part};
use crate::{Error, Result, C64};

/// Heavy-set threshold on `|Û(x)|` for degree-`d` unitaries,
/// `ε^{d+1} C^{−d(d+1)·f}` with `f` the configured exponent factor.
pub fn unitary_threshold(params: &LearnParams) -> f64 {
    if let Some(c) = params.c_override {
        return c;
    }
    let d = params.d as f64;
    params.epsilon.powf(d + 1.0) * params.bh_constant.powf(-d * (d + 1.0) * params.unitary_exponent_factor)
}

/// Learns a degree-`d` unitary to ℓ2 error `ε`.
///
/// Bell samples of `|v(U)⟩` estimate `|Û(x)|²` to ℓ∞ error `c²`; the heavy set
/// is `{x : √freq ≥ c}`. Hadamard tests then estimate the real and imaginary
/// parts of each heavy coefficient to error `cε/√2`.
pub fn learn_unitary<O: Oracle + ?Sized>(oracle: &mut O, params: &LearnParams) -> Result<LearnReport> {
    params.validate()?;
    let n = oracle.n();
    let before = oracle.queries();
    let c = unitary_threshold(params);
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("degenerate threshold c = {c}")));
    }
    let half = params.delta / 2.0;

    let t1 = params.shots(linf_sample_size(c * c, half) as f64)?;
    let freq = frequencies(oracle.bell_unitary(t1)?)?;
    let heavy: Vec<PauliString> = freq
        .iter()
        .filter(|(_, &f)| f.sqrt() >= c)
        .map(|(x, _)| x.clone())
        .collect();

    let per_test_delta = half / (2.0 * heavy.len().max(1) as f64);
    let eta = c * params.epsilon / 2f64.sqrt();
    let shots = params.shots(2.0 * (2.0 / per_test_delta).ln() / (eta * eta))?;
    let mut entries = Vec::with_capacity(heavy.len());
    for x in &heavy {
        let re = hadamard_test(oracle, x, Part::Re, shots)?;
        let im = hadamard_test(oracle, x, Part::Im, shots)?;
        entries.push((x.clone(), C64::new(re, im)));
    }
    let learned = OperatorSpectrum::new(n, entries)?;
    Ok(LearnReport {
        algorithm: "learn-unitary".into(),
        params: params.clone(),
        queries: queries_since(oracle, &before),
        threshold: Some(c),
        heavy_set: heavy.iter().map(|x| x.to_string()).collect(),
        learned: LearnedSpectrum::Operator(learned),
        errors: None,
        notes: vec![format!("Bell samples {t1}"), format!("shots per Hadamard test {shots}")],
    })
}
