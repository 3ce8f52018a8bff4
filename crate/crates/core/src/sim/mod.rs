//! Shot-level simulation of the measurement primitives the learners consume.
//!
//! Every primitive is simulated from its exact outcome law on the hidden
//! target. Batched calls return outcome counts, so the cost of a call grows
//! with the support of the law rather than with the shot count.

pub mod block;
pub mod circuit;
mod oracle;
pub mod sampling;
mod target;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use block::{block_encoding_spectrum, build_block_encoding, sector_key, subset_of_sector};
pub use circuit::{circuit_cross_check, CrossCheckCase, Distribution, CROSS_CHECK_CAP};
pub use oracle::{SampleRecord, ShotOracle};
pub use target::Target;

use crate::pauli::{PauliString, Subset};
use crate::rng::StreamRng;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Primitive {
    ChoiDiag,
    SwapTest,
    BellUnitary,
    HadamardTest,
    PauliProbe,
    FourierSample,
    ClassicalExample,
    BlockEncodingCj,
}

impl Primitive {
    pub const ALL: [Primitive; 8] = [
        Primitive::ChoiDiag,
        Primitive::SwapTest,
        Primitive::BellUnitary,
        Primitive::HadamardTest,
        Primitive::PauliProbe,
        Primitive::FourierSample,
        Primitive::ClassicalExample,
        Primitive::BlockEncodingCj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Primitive::ChoiDiag => "choi-diag",
            Primitive::SwapTest => "swap-test",
            Primitive::BellUnitary => "bell-unitary",
            Primitive::HadamardTest => "hadamard-test",
            Primitive::PauliProbe => "pauli-probe",
            Primitive::FourierSample => "fourier-sample",
            Primitive::ClassicalExample => "classical-example",
            Primitive::BlockEncodingCj => "block-encoding-cj",
        }
    }

    pub(crate) fn stream_id(self) -> u64 {
        Self::ALL.iter().position(|&p| p == self).expect("listed") as u64 + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

impl std::str::FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "re" | "Re" => Ok(Part::Re),
            "im" | "Im" => Ok(Part::Im),
            _ => Err(Error::InvalidParams(format!("unknown part tag {s:?}"))),
        }
    }
}

/// Reference state `ρ'` compared against the Choi state by a SWAP test,
/// written in the Bell basis `|v_x⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapTarget {
    /// `|x⟩⟨x|`
    Basis(PauliString),
    /// `(|x⟩⟨x| + |y⟩⟨y|)/2`
    Mixture(PauliString, PauliString),
    /// `|ψ⟩⟨ψ|` with `ψ = (|x⟩ + |y⟩)/√2`
    RealSuperposition(PauliString, PauliString),
    /// `|ψ⟩⟨ψ|` with `ψ = (|x⟩ − i|y⟩)/√2`
    ImagSuperposition(PauliString, PauliString),
}

/// Outcome counts in key order, zero counts omitted.
pub type Counts<K> = Vec<(K, u128)>;

/// Result of a batch of Fourier-sampling attempts.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierBatch {
    /// Attempts whose post-selection failed.
    pub rejected: u128,
    pub counts: Counts<Subset>,
}

/// Aggregated uniform examples `(x, f(x), multiplicity)`, bit `i` of `x` set
/// meaning `x_i = −1`.
pub type ExampleBatch = Vec<(u64, f64, u128)>;

/// The only view of an unknown object a learner gets.
pub trait Oracle {
    fn n(&self) -> usize;

    /// Bell measurements of the Choi state: draws from `x ↦ Φ̂(x,x)`.
    fn choi_diag(&mut self, shots: u128) -> Result<Counts<PauliString>>;

    /// Number of "same" outcomes in `shots` SWAP tests of the Choi state against `target`.
    fn swap_test(&mut self, target: &SwapTarget, shots: u128) -> Result<u128>;

    /// Bell measurements of `|v(U)⟩`: draws from `x ↦ |Û(x)|²`.
    fn bell_unitary(&mut self, shots: u128) -> Result<Counts<PauliString>>;

    /// Number of `+1` outcomes in `shots` Hadamard tests for `Û(x)`.
    fn hadamard_test(&mut self, x: &PauliString, part: Part, shots: u128) -> Result<u128>;

    /// Product-state probes of a Pauli channel in basis `s`; counts over `r = s⋆x`.
    fn pauli_probe(&mut self, s: &PauliString, shots: u128) -> Result<Counts<u64>>;

    /// Fourier sampling from quantum uniform examples.
    fn fourier_sample(&mut self, shots: u128) -> Result<FourierBatch>;

    /// Classical uniform examples `(x, f(x))`.
    fn classical_examples(&mut self, shots: u128) -> Result<ExampleBatch>;

    /// Bell measurements of the Choi state of the block encoding `U_p`.
    fn block_encoding_cj(&mut self, shots: u128) -> Result<Counts<PauliString>>;

    /// Randomness for the learner's own choices, separate from the primitives.
    fn learner_rng(&mut self) -> &mut StreamRng;

    /// Queries charged so far, per primitive.
    fn queries(&self) -> BTreeMap<Primitive, u128>;
}

fn expand<K: Clone, O: Oracle + ?Sized>(oracle: &mut O, counts: &Counts<K>) -> Vec<K> {
    sampling::expand_shuffled(oracle.learner_rng(), counts)
}

/// `shots` i.i.d. draws from `x ↦ Φ̂(x,x)`.
pub fn sample_choi_diag_channel<O: Oracle + ?Sized>(oracle: &mut O, shots: usize) -> Result<Vec<PauliString>> {
    let counts = oracle.choi_diag(shots as u128)?;
    Ok(expand(oracle, &counts))
}

/// Mean of `shots` `±1` outcomes, `2k/shots − 1`.
pub fn pm_mean(plus: u128, shots: u128) -> f64 {
    if shots == 0 {
        return 0.0;
    }
    2.0 * (plus as f64 / shots as f64) - 1.0
}

/// Estimates `Φ̂(x,y)` from SWAP tests with `per_test` shots each: one test
/// when `x = y`, otherwise three (mixture, real and imaginary superposition).
pub fn estimate_channel_coeff_per_test<O: Oracle + ?Sized>(
    oracle: &mut O,
    x: &PauliString,
    y: &PauliString,
    per_test: u128,
) -> Result<C64> {
    if per_test == 0 {
        return Err(Error::InvalidParams("SWAP test needs at least one shot".into()));
    }
    if x == y {
        let k = oracle.swap_test(&SwapTarget::Basis(x.clone()), per_test)?;
        return Ok(C64::new(pm_mean(k, per_test), 0.0));
    }
    let diag = pm_mean(oracle.swap_test(&SwapTarget::Mixture(x.clone(), y.clone()), per_test)?, per_test);
    let re = pm_mean(
        oracle.swap_test(&SwapTarget::RealSuperposition(x.clone(), y.clone()), per_test)?,
        per_test,
    );
    let im = pm_mean(
        oracle.swap_test(&SwapTarget::ImagSuperposition(x.clone(), y.clone()), per_test)?,
        per_test,
    );
    Ok(C64::new(re - diag, im - diag))
}

/// [`estimate_channel_coeff_per_test`] with `shots` split evenly over the tests.
pub fn estimate_channel_coeff<O: Oracle + ?Sized>(
    oracle: &mut O,
    x: &PauliString,
    y: &PauliString,
    shots: u128,
) -> Result<C64> {
    let tests = if x == y { 1 } else { 3 };
    estimate_channel_coeff_per_test(oracle, x, y, (shots / tests).max(1))
}

/// `shots` i.i.d. draws from `x ↦ |Û(x)|²`.
pub fn bell_sample_unitary<O: Oracle + ?Sized>(oracle: &mut O, shots: usize) -> Result<Vec<PauliString>> {
    let counts = oracle.bell_unitary(shots as u128)?;
    Ok(expand(oracle, &counts))
}

/// Mean of `±1` Hadamard-test outcomes, an unbiased estimate of `Re Û(x)` or `Im Û(x)`.
pub fn hadamard_test<O: Oracle + ?Sized>(oracle: &mut O, x: &PauliString, part: Part, shots: u128) -> Result<f64> {
    let k = oracle.hadamard_test(x, part, shots)?;
    Ok(pm_mean(k, shots))
}

/// One probe of a Pauli channel in basis `s`.
pub fn pauli_channel_probe<O: Oracle + ?Sized>(oracle: &mut O, s: &PauliString) -> Result<u64> {
    let counts = oracle.pauli_probe(s, 1)?;
    Ok(counts[0].0)
}

/// One quantum uniform example used for Fourier sampling; `None` when the
/// post-selection fails.
pub fn quantum_example_boolean<O: Oracle + ?Sized>(oracle: &mut O) -> Result<Option<Subset>> {
    let b = oracle.fourier_sample(1)?;
    Ok(b.counts.first().map(|(s, _)| *s))
}

/// One classical uniform example `(x, f(x))`.
pub fn classical_example_boolean<O: Oracle + ?Sized>(oracle: &mut O) -> Result<(u64, f64)> {
    let b = oracle.classical_examples(1)?;
    Ok((b[0].0, b[0].1))
}

/// `shots` i.i.d. draws from `x ↦ |Û_p(x)|²` over `n+1` sites.
pub fn cj_sample_block_encoding<O: Oracle + ?Sized>(oracle: &mut O, shots: usize) -> Result<Vec<PauliString>> {
    let counts = oracle.block_encoding_cj(shots as u128)?;
    Ok(expand(oracle, &counts))
}
