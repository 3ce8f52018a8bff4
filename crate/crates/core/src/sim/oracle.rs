use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{binomial, multinomial};
use super::target::Target;
use super::{Counts, ExampleBatch, FourierBatch, Oracle, Part, Primitive, SwapTarget};
use crate::pauli::{bits_to_string, PauliString, Subset};
use crate::rng::{stream, StreamRng};
use crate::{Error, Result};

/// Largest number of individually drawn classical examples in one call.
const MAX_INDIVIDUAL_EXAMPLES: u128 = 50_000_000;
/// Largest `n` for which classical examples are drawn as a histogram.
const HISTOGRAM_MAX_N: usize = 20;

const LEARNER_STREAM: u64 = 1_000;

/// One aggregated log line: `count` identical outcomes starting at `query_index`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub primitive: Primitive,
    pub inputs: serde_json::Value,
    pub outcome: String,
    pub count: u128,
    pub query_index: u128,
}

#[derive(Default)]
struct LawCache {
    choi_diag: Option<Vec<(PauliString, f64)>>,
    bell: Option<Vec<(PauliString, f64)>>,
    fourier: Option<Vec<(Subset, f64)>>,
    block: Option<Vec<(PauliString, f64)>>,
    table: Option<Vec<f64>>,
}

/// Budgeted access to a hidden target through its measurement primitives.
pub struct ShotOracle {
    target: Target,
    seed: u64,
    streams: BTreeMap<Primitive, StreamRng>,
    learner: StreamRng,
    used: BTreeMap<Primitive, u128>,
    budget: Option<u128>,
    log: Option<Vec<SampleRecord>>,
    cache: LawCache,
}

impl ShotOracle {
    /// Validates `target` and wraps it. Each primitive draws from its own
    /// sub-stream of `seed`.
    pub fn new(target: Target, seed: u64) -> Result<Self> {
        Ok(Self {
            target: target.checked()?,
            seed,
            streams: BTreeMap::new(),
            learner: stream(seed, LEARNER_STREAM),
            used: BTreeMap::new(),
            budget: None,
            log: None,
            cache: LawCache::default(),
        })
    }

    /// Caps the total number of queries across all primitives.
    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = Some(budget);
        self
    }

    /// Keeps an in-memory sample log.
    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn total_queries(&self) -> u128 {
        self.used.values().sum()
    }

    pub fn log(&self) -> Option<&[SampleRecord]> {
        self.log.as_deref()
    }

    /// Writes the log as line-delimited JSON.
    pub fn write_log(&self, mut w: impl Write) -> Result<()> {
        for r in self.log.iter().flatten() {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Charges `shots` queries and returns the index of the first one.
    fn charge(&mut self, primitive: Primitive, shots: u128) -> Result<u128> {
        let total = self.total_queries();
        if let Some(b) = self.budget {
            let remaining = b.saturating_sub(total);
            if shots > remaining {
                return Err(Error::BudgetExceeded {
                    primitive,
                    requested: shots,
                    remaining,
                });
            }
        }
        *self.used.entry(primitive).or_default() += shots;
        Ok(total)
    }

    fn rng(&mut self, primitive: Primitive) -> &mut StreamRng {
        let seed = self.seed;
        self.streams
            .entry(primitive)
            .or_insert_with(|| stream(seed, primitive.stream_id()))
    }

    fn record(
        &mut self,
        primitive: Primitive,
        inputs: serde_json::Value,
        start: u128,
        outcomes: impl IntoIterator<Item = (String, u128)>,
    ) {
        if let Some(log) = self.log.as_mut() {
            let mut index = start;
            for (outcome, count) in outcomes {
                log.push(SampleRecord {
                    primitive,
                    inputs: inputs.clone(),
                    outcome,
                    count,
                    query_index: index,
                });
                index += count;
            }
        }
    }

    fn draw<K: Clone>(&mut self, primitive: Primitive, law: &[(K, f64)], shots: u128) -> Counts<K> {
        let probs: Vec<f64> = law.iter().map(|(_, p)| *p).collect();
        let counts = multinomial(self.rng(primitive), shots, &probs);
        law.iter()
            .zip(counts)
            .filter(|(_, c)| *c > 0)
            .map(|((k, _), c)| (k.clone(), c))
            .collect()
    }

    fn bernoulli(&mut self, primitive: Primitive, p: f64, shots: u128) -> u128 {
        binomial(self.rng(primitive), shots, p)
    }

    fn table(&mut self) -> Result<Option<&[f64]>> {
        let f = self.target.function()?;
        if f.n() > HISTOGRAM_MAX_N {
            return Ok(None);
        }
        if self.cache.table.is_none() {
            self.cache.table = Some(f.to_truth_table()?);
        }
        Ok(self.cache.table.as_deref())
    }
}

fn pauli_counts_log(counts: &Counts<PauliString>) -> Vec<(String, u128)> {
    counts.iter().map(|(x, c)| (x.to_string(), *c)).collect()
}

impl Oracle for ShotOracle {
    fn n(&self) -> usize {
        self.target.n()
    }

    fn choi_diag(&mut self, shots: u128) -> Result<Counts<PauliString>> {
        if self.cache.choi_diag.is_none() {
            self.cache.choi_diag = Some(self.target.choi_diag_law()?);
        }
        let start = self.charge(Primitive::ChoiDiag, shots)?;
        let law = self.cache.choi_diag.take().expect("cached");
        let counts = self.draw(Primitive::ChoiDiag, &law, shots);
        self.cache.choi_diag = Some(law);
        self.record(Primitive::ChoiDiag, serde_json::Value::Null, start, pauli_counts_log(&counts));
        Ok(counts)
    }

    fn swap_test(&mut self, target: &SwapTarget, shots: u128) -> Result<u128> {
        let p = self.target.swap_pass_probability(target)?;
        let start = self.charge(Primitive::SwapTest, shots)?;
        let k = self.bernoulli(Primitive::SwapTest, p, shots);
        let inputs = serde_json::to_value(target)?;
        self.record(Primitive::SwapTest, inputs, start, [("0".into(), k), ("1".into(), shots - k)]);
        Ok(k)
    }

    fn bell_unitary(&mut self, shots: u128) -> Result<Counts<PauliString>> {
        if self.cache.bell.is_none() {
            self.cache.bell = Some(self.target.bell_law()?);
        }
        let start = self.charge(Primitive::BellUnitary, shots)?;
        let law = self.cache.bell.take().expect("cached");
        let counts = self.draw(Primitive::BellUnitary, &law, shots);
        self.cache.bell = Some(law);
        self.record(Primitive::BellUnitary, serde_json::Value::Null, start, pauli_counts_log(&counts));
        Ok(counts)
    }

    fn hadamard_test(&mut self, x: &PauliString, part: Part, shots: u128) -> Result<u128> {
        if x.n() != self.n() {
            return Err(Error::QubitMismatch {
                expected: self.n(),
                found: x.n(),
            });
        }
        let p = self.target.hadamard_plus_probability(x, part)?;
        let start = self.charge(Primitive::HadamardTest, shots)?;
        let k = self.bernoulli(Primitive::HadamardTest, p, shots);
        let inputs = serde_json::json!({ "x": x, "part": part });
        self.record(Primitive::HadamardTest, inputs, start, [("+1".into(), k), ("-1".into(), shots - k)]);
        Ok(k)
    }

    fn pauli_probe(&mut self, s: &PauliString, shots: u128) -> Result<Counts<u64>> {
        let law = self.target.probe_law(s)?;
        let start = self.charge(Primitive::PauliProbe, shots)?;
        let counts = self.draw(Primitive::PauliProbe, &law, shots);
        let n = self.n();
        let inputs = serde_json::json!({ "s": s });
        self.record(
            Primitive::PauliProbe,
            inputs,
            start,
            counts.iter().map(|(r, c)| (bits_to_string(*r, n), *c)),
        );
        Ok(counts)
    }

    fn fourier_sample(&mut self, shots: u128) -> Result<FourierBatch> {
        if self.cache.fourier.is_none() {
            self.cache.fourier = Some(self.target.fourier_law()?);
        }
        let start = self.charge(Primitive::FourierSample, shots)?;
        let accepted = self.bernoulli(Primitive::FourierSample, 0.5, shots);
        let law = self.cache.fourier.take().expect("cached");
        let counts = self.draw(Primitive::FourierSample, &law, accepted);
        self.cache.fourier = Some(law);
        let n = self.n();
        let rejected = shots - accepted;
        self.record(
            Primitive::FourierSample,
            serde_json::Value::Null,
            start,
            std::iter::once(("rejected".to_string(), rejected))
                .chain(counts.iter().map(|(s, c)| (s.to_digits(n), *c))),
        );
        Ok(FourierBatch { rejected, counts })
    }

    fn classical_examples(&mut self, shots: u128) -> Result<ExampleBatch> {
        let n = self.n();
        self.target.function()?;
        let start = self.charge(Primitive::ClassicalExample, shots)?;
        let mut batch: ExampleBatch = Vec::new();
        let use_histogram = n <= HISTOGRAM_MAX_N && shots >= 4u128 << n;
        if use_histogram {
            let cells = vec![1.0; 1 << n];
            let counts = multinomial(self.rng(Primitive::ClassicalExample), shots, &cells);
            let table = self.table()?.expect("n within histogram cap");
            for (x, c) in counts.into_iter().enumerate() {
                if c > 0 {
                    batch.push((x as u64, table[x], c));
                }
            }
        } else {
            if shots > MAX_INDIVIDUAL_EXAMPLES {
                return Err(Error::CapExceeded {
                    what: "individually drawn classical examples",
                    n,
                    cap: HISTOGRAM_MAX_N,
                });
            }
            let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
            let mut hist: BTreeMap<u64, u128> = BTreeMap::new();
            for _ in 0..shots {
                let x = self.rng(Primitive::ClassicalExample).random::<u64>() & mask;
                *hist.entry(x).or_default() += 1;
            }
            let table = self.table()?.map(|t| t.to_vec());
            let f = self.target.function()?;
            for (x, c) in hist {
                let v = match &table {
                    Some(t) => t[x as usize],
                    None => f.eval(x),
                };
                batch.push((x, v, c));
            }
        }
        self.record(
            Primitive::ClassicalExample,
            serde_json::Value::Null,
            start,
            batch.iter().map(|(x, v, c)| (format!("{}:{v}", bits_to_string(*x, n)), *c)),
        );
        Ok(batch)
    }

    fn block_encoding_cj(&mut self, shots: u128) -> Result<Counts<PauliString>> {
        if self.cache.block.is_none() {
            self.cache.block = Some(self.target.block_encoding_law()?);
        }
        let start = self.charge(Primitive::BlockEncodingCj, shots)?;
        let law = self.cache.block.take().expect("cached");
        let counts = self.draw(Primitive::BlockEncodingCj, &law, shots);
        self.cache.block = Some(law);
        self.record(Primitive::BlockEncodingCj, serde_json::Value::Null, start, pauli_counts_log(&counts));
        Ok(counts)
    }

    fn learner_rng(&mut self) -> &mut StreamRng {
        &mut self.learner
    }

    fn queries(&self) -> BTreeMap<Primitive, u128> {
        self.used.clone()
    }
}
