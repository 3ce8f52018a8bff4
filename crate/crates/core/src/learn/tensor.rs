use std::collections::BTreeMap;

use super::{LearnParams, LearnReport, LearnedSpectrum};
use crate::bh::{Field, MultilinearTensor};
use crate::{Error, Result, C64};

/// `⌈κ ε^{−(d+1)} ln(2n^d/δ)⌉` before the shot multiplier.
pub fn tensor_sample_size(n: usize, params: &LearnParams) -> Result<u128> {
    let d = params.d as f64;
    let theory = params.kappa
        * params.epsilon.powf(-(d + 1.0))
        * (2.0 * (n as f64).powf(d) / params.delta).ln();
    params.shots(theory.ceil())
}

/// Learns the coefficients of a block-multilinear form from uniform samples
/// `(x, T(x))`: every coefficient is estimated by the empirical mean of
/// `T(x) x_1(i_1)…x_d(i_d)` and kept only if its modulus is at least `τ`.
pub fn learn_tensor_ei(samples: &[(Vec<u64>, C64)], d: usize, n: usize, params: &LearnParams) -> Result<LearnReport> {
    params.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyInput("tensor samples"));
    }
    if n == 0 || n > 64 {
        return Err(Error::InvalidParams(format!("side {n} outside 1..=64")));
    }
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for (x, _) in samples {
        if x.len() != d || x.iter().any(|b| b & !mask != 0) {
            return Err(Error::ShapeMismatch(format!(
                "sample with {} blocks (expected {d} blocks of {n} bits)",
                x.len()
            )));
        }
    }
    let tau = params
        .tau
        .unwrap_or_else(|| params.epsilon.powf((d as f64 + 1.0) / 2.0) / 2.0);
    let zero = MultilinearTensor::zeros(d, n, Field::Complex)?;
    let mut acc = vec![C64::new(0.0, 0.0); zero.entries().len()];
    for (x, amp) in samples {
        let mut vals = vec![*amp];
        for &xt in x {
            let mut next = Vec::with_capacity(vals.len() * n);
            for v in &vals {
                for i in 0..n {
                    next.push(if xt >> i & 1 == 1 { -v } else { *v });
                }
            }
            vals = next;
        }
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += v;
        }
    }
    let total = samples.len() as f64;
    let mut kept = Vec::new();
    for (k, a) in acc.iter_mut().enumerate() {
        *a /= total;
        if a.norm() < tau {
            *a = C64::new(0.0, 0.0);
        } else {
            kept.push(k);
        }
    }
    let field = if acc.iter().all(|c| c.im == 0.0) {
        Field::Real
    } else {
        Field::Complex
    };
    let learned = MultilinearTensor::from_dense(d, n, field, acc)?;
    let heavy_set = kept
        .into_iter()
        .map(|k| {
            learned
                .unflat(k)
                .iter()
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    Ok(LearnReport {
        algorithm: "learn-tensor-ei".into(),
        params: params.clone(),
        queries: BTreeMap::from([("samples".to_string(), samples.len() as u128)]),
        threshold: Some(tau),
        heavy_set,
        learned: LearnedSpectrum::Tensor(learned),
        errors: None,
        notes: Vec::new(),
    })
}
