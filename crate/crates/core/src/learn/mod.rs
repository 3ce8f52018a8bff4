//! Learners for low-degree channels, unitaries, Pauli channels, Boolean
//! functions, bounded polynomials and block-multilinear forms. Learners see
//! the target only through an [`Oracle`](crate::sim::Oracle).

mod boolean;
mod channel;
mod empirical;
mod pauli;
mod tensor;
mod unitary;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use boolean::{learn_bounded_poly, learn_boolean_exact, round_to_grid, BooleanMode, Rounded};
pub use channel::{channel_threshold, learn_channel};
pub use empirical::{empirical_distribution, linf_error_bound, linf_sample_size};
pub use pauli::{learn_pauli_channel, learn_pauli_channel_entangled, pauli_estimator_term, pauli_probe_count};
pub use tensor::{learn_tensor_ei, tensor_sample_size};
pub use unitary::{learn_unitary, unitary_threshold};

use crate::bh::MultilinearTensor;
use crate::pauli::io::SpectrumIo;
use crate::pauli::{BooleanSpectrum, OperatorSpectrum, PauliString, SuperopSpectrum};
use crate::sim::{Oracle, Primitive};
use crate::{Error, Result};

/// Which threshold formula the channel learner uses when no override is set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdRule {
    /// `c = ε^{2d+2} C^{−d(d+1)}`
    #[default]
    Proof,
    /// `c = ε^{4d+2} C^{−4d²}`
    Box,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnParams {
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Replaces the theory threshold (`c`, or `a` for bounded polynomials).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_override: Option<f64>,
    /// Scales every theory-derived shot count.
    pub shot_multiplier: f64,
    /// The unspecified constant `C` in the threshold formulas.
    pub bh_constant: f64,
    pub threshold_rule: ThresholdRule,
    /// Extra factor on the exponent of `C` in the unitary threshold.
    pub unitary_exponent_factor: f64,
    /// Fixed shot count used instead of every theory count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots_override: Option<u128>,
    /// Tensor learner keep-threshold; defaults to `ε^{(d+1)/2}/2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Leading constant of the tensor learner's sample size.
    pub kappa: f64,
    /// Largest number of candidate keys a learner may enumerate.
    pub enumeration_cap: u128,
}

impl Default for LearnParams {
    fn default() -> Self {
        Self {
            d: 1,
            epsilon: 0.1,
            delta: 0.1,
            c_override: None,
            shot_multiplier: 1.0,
            bh_constant: 2.0,
            threshold_rule: ThresholdRule::Proof,
            unitary_exponent_factor: 1.0,
            shots_override: None,
            tau: None,
            kappa: 1.0,
            enumeration_cap: 1 << 20,
        }
    }
}

impl LearnParams {
    pub fn new(d: usize, epsilon: f64, delta: f64) -> Self {
        Self {
            d,
            epsilon,
            delta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon {} outside (0, 1)", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} outside (0, 1)", self.delta));
        }
        if !(self.shot_multiplier >= 0.0 && self.shot_multiplier.is_finite()) {
            return bad(format!("shot multiplier {} must be finite and ≥ 0", self.shot_multiplier));
        }
        if !(self.bh_constant >= 1.0 && self.bh_constant.is_finite()) {
            return bad(format!("BH constant {} must be ≥ 1", self.bh_constant));
        }
        if let Some(c) = self.c_override {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("degenerate threshold c = {c}"));
            }
        }
        if let Some(t) = self.tau {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("tau {t} must be ≥ 0"));
            }
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa {} must be positive", self.kappa));
        }
        Ok(())
    }

    /// `⌈theory · shot_multiplier⌉`, at least 1; `shots_override` wins.
    pub fn shots(&self, theory: f64) -> Result<u128> {
        if let Some(s) = self.shots_override {
            return Ok(s.max(1));
        }
        let v = (theory * self.shot_multiplier).ceil();
        if !v.is_finite() || v >= u128::MAX as f64 {
            return Err(Error::InvalidParams(format!("shot count {theory:e} is not representable")));
        }
        Ok((v as u128).max(1))
    }

    fn check_keys(&self, what: &'static str, count: u128, n: usize) -> Result<()> {
        if count > self.enumeration_cap {
            return Err(Error::CapExceeded {
                what,
                n,
                cap: self.enumeration_cap.min(usize::MAX as u128) as usize,
            });
        }
        Ok(())
    }
}

/// What a learner outputs.
#[derive(Clone, Debug, PartialEq)]
pub enum LearnedSpectrum {
    Operator(OperatorSpectrum),
    Superop(SuperopSpectrum),
    Boolean(BooleanSpectrum<f64>),
    Tensor(MultilinearTensor),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AchievedErrors {
    pub l2: f64,
    pub l2sq: f64,
    /// Total variation between error-rate vectors, for Pauli-diagonal maps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv: Option<f64>,
    /// Literal equality of every coefficient, for Boolean spectra.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
}

fn is_diagonal(s: &SuperopSpectrum) -> bool {
    s.iter().all(|((x, y), _)| x == y)
}

impl LearnedSpectrum {
    pub fn kind(&self) -> &'static str {
        match self {
            LearnedSpectrum::Operator(_) => "operator",
            LearnedSpectrum::Superop(_) => "superop",
            LearnedSpectrum::Boolean(_) => "boolean",
            LearnedSpectrum::Tensor(_) => "tensor",
        }
    }

    /// Distances to a ground truth of the same kind.
    pub fn errors_against(&self, truth: &LearnedSpectrum) -> Result<AchievedErrors> {
        let mismatch = || Error::ShapeMismatch(format!("cannot compare {} with {}", self.kind(), truth.kind()));
        match (self, truth) {
            (LearnedSpectrum::Operator(a), LearnedSpectrum::Operator(b)) => {
                let l2 = a.l2_distance(b);
                Ok(AchievedErrors {
                    l2,
                    l2sq: l2 * l2,
                    tv: None,
                    exact: None,
                })
            }
            (LearnedSpectrum::Superop(a), LearnedSpectrum::Superop(b)) => {
                let l2 = a.l2_distance(b);
                let tv = (is_diagonal(a) && is_diagonal(b)).then(|| {
                    let (da, db) = (a.diagonal(), b.diagonal());
                    let keys: std::collections::BTreeSet<&PauliString> = da.keys().chain(db.keys()).collect();
                    0.5 * keys
                        .into_iter()
                        .map(|k| (da.get(k).copied().unwrap_or(0.0) - db.get(k).copied().unwrap_or(0.0)).abs())
                        .sum::<f64>()
                });
                Ok(AchievedErrors {
                    l2,
                    l2sq: l2 * l2,
                    tv,
                    exact: None,
                })
            }
            (LearnedSpectrum::Boolean(a), LearnedSpectrum::Boolean(b)) => {
                let l2sq = a.l2sq_distance(b);
                let exact = a.len() == b.len() && a.iter().all(|(s, c)| b.get(*s) == *c);
                Ok(AchievedErrors {
                    l2: l2sq.sqrt(),
                    l2sq,
                    tv: None,
                    exact: Some(exact),
                })
            }
            (LearnedSpectrum::Tensor(a), LearnedSpectrum::Tensor(b)) => {
                if a.d() != b.d() || a.n() != b.n() {
                    return Err(mismatch());
                }
                let l2sq: f64 = a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm_sqr()).sum();
                Ok(AchievedErrors {
                    l2: l2sq.sqrt(),
                    l2sq,
                    tv: None,
                    exact: None,
                })
            }
            _ => Err(mismatch()),
        }
    }

    fn to_value(&self) -> serde_json::Value {
        match self {
            LearnedSpectrum::Operator(s) => serde_json::to_value(s.to_document()),
            LearnedSpectrum::Superop(s) => serde_json::to_value(s.to_document()),
            LearnedSpectrum::Boolean(s) => serde_json::to_value(s.to_document()),
            LearnedSpectrum::Tensor(t) => {
                let entries: Vec<serde_json::Value> = t
                    .entries()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() > 0.0)
                    .map(|(k, c)| serde_json::json!({ "index": t.unflat(k), "re": c.re, "im": c.im }))
                    .collect();
                Ok(serde_json::json!({ "kind": "tensor", "d": t.d(), "n": t.n(), "entries": entries }))
            }
        }
        .expect("spectrum documents serialize")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnReport {
    pub algorithm: String,
    pub params: LearnParams,
    /// Queries spent by this run, per primitive name.
    pub queries: BTreeMap<String, u128>,
    /// Threshold actually used (`c`, `a`, or `τ`).
    pub threshold: Option<f64>,
    pub heavy_set: Vec<String>,
    pub learned: LearnedSpectrum,
    pub errors: Option<AchievedErrors>,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    algorithm: &'a str,
    params: &'a LearnParams,
    queries: &'a BTreeMap<String, u128>,
    total_queries: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    heavy_set: &'a [String],
    learned: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    achieved_errors: Option<&'a AchievedErrors>,
    notes: &'a [String],
}

impl LearnReport {
    pub fn total_queries(&self) -> u128 {
        self.queries.values().sum()
    }

    /// Fills in `errors` against the ground truth.
    pub fn score(&mut self, truth: &LearnedSpectrum) -> Result<&AchievedErrors> {
        self.errors = Some(self.learned.errors_against(truth)?);
        Ok(self.errors.as_ref().expect("just set"))
    }

    pub fn to_value(&self) -> serde_json::Value {
        let doc = ReportDocument {
            algorithm: &self.algorithm,
            params: &self.params,
            queries: &self.queries,
            total_queries: self.total_queries(),
            threshold: self.threshold,
            heavy_set: &self.heavy_set,
            learned: self.learned.to_value(),
            achieved_errors: self.errors.as_ref(),
            notes: &self.notes,
        };
        serde_json::to_value(doc).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("report serializes")
    }
}

/// Per-primitive queries spent since `before`.
fn queries_since<O: Oracle + ?Sized>(oracle: &O, before: &BTreeMap<Primitive, u128>) -> BTreeMap<String, u128> {
    oracle
        .queries()
        .into_iter()
        .map(|(p, c)| (p.name().to_string(), c - before.get(&p).copied().unwrap_or(0)))
        .filter(|(_, c)| *c > 0)
        .collect()
}
