//! Block-multilinear quantum query algorithms and their amplitude tensors.
//!
//! The query register has dimension `n` and the workspace dimension `m`; the
//! joint basis index is `i·m + w`. Query `t` applies `O_{x_t} ⊗ I_m` with
//! `O_x = diag(x(1), …, x(n))`.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bh::{Field, MultilinearTensor};
use crate::random::haar_unitary;
use crate::rng::{split_seed, stream};
use crate::{Error, Result, C64};

pub const UNITARY_TOL: f64 = 1e-9;
pub const VECTOR_TOL: f64 = 1e-10;
/// Largest `n·d` for extraction by enumerating all `2^{nd}` points.
pub const ENUMERATION_CAP: usize = 20;
/// Points per independently seeded chunk of a sample stream.
pub const STREAM_CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct QueryAlgorithm {
    n: usize,
    m: usize,
    unitaries: Vec<DMatrix<C64>>,
    u: DVector<C64>,
    v: DVector<C64>,
}

/// Serialized form: matrices as row-major `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgorithmFile {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub unitaries: Vec<Vec<[f64; 2]>>,
    pub u: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
}

/// The amplitude tensor of an algorithm together with the algorithm.
#[derive(Clone, Debug)]
pub struct AmplitudeTensor {
    pub tensor: MultilinearTensor,
    pub algorithm: QueryAlgorithm,
}

fn pairs(v: impl Iterator<Item = C64>) -> Vec<[f64; 2]> {
    v.map(|c| [c.re, c.im]).collect()
}

impl QueryAlgorithm {
    /// `unitaries` holds `U_0, …, U_d`, so `d = unitaries.len() − 1`.
    pub fn new(n: usize, m: usize, unitaries: Vec<DMatrix<C64>>, u: DVector<C64>, v: DVector<C64>) -> Result<Self> {
        if n == 0 || m == 0 || unitaries.len() < 2 {
            return Err(Error::InvalidParams("need n, m ≥ 1 and at least one query".into()));
        }
        let dim = n * m;
        for (k, w) in unitaries.iter().enumerate() {
            if w.nrows() != dim || w.ncols() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "U_{k} is {}×{}, expected {dim}×{dim}",
                    w.nrows(),
                    w.ncols()
                )));
            }
            let dev = (w.adjoint() * w - DMatrix::<C64>::identity(dim, dim)).camax();
            if dev > UNITARY_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        for (name, x) in [("u", &u), ("v", &v)] {
            if x.len() != dim {
                return Err(Error::ShapeMismatch(format!("{name} has length {}, expected {dim}", x.len())));
            }
            if (x.norm() - 1.0).abs() > VECTOR_TOL {
                return Err(Error::InvalidParams(format!("{name} is not a unit vector")));
            }
        }
        Ok(Self { n, m, unitaries, u, v })
    }

    /// Haar-random `U_0..U_d` with `u = v = e_0`.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, d: usize, rng: &mut R) -> Result<Self> {
        let dim = n * m;
        let unitaries = (0..=d).map(|_| haar_unitary(dim, rng)).collect();
        let e0 = DVector::from_fn(dim, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
        Self::new(n, m, unitaries, e0.clone(), e0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.unitaries.len() - 1
    }

    pub fn unitaries(&self) -> &[DMatrix<C64>] {
        &self.unitaries
    }

    pub fn start(&self) -> &DVector<C64> {
        &self.u
    }

    pub fn accept(&self) -> &DVector<C64> {
        &self.v
    }

    /// Runs the algorithm with query `t` replaced by `query(t, state)`.
    fn run(&self, mut query: impl FnMut(usize, &mut DVector<C64>)) -> C64 {
        let mut psi = &self.unitaries[0] * &self.u;
        for t in 0..self.d() {
            query(t, &mut psi);
            psi = &self.unitaries[t + 1] * psi;
        }
        self.v.dotc(&psi)
    }

    /// `⟨v|U_d (O_{x_d}⊗I) … U_0|u⟩`; bit `i` of `x[t]` set means `x_t(i) = −1`.
    pub fn evaluate(&self, x: &[u64]) -> Result<C64> {
        if x.len() != self.d() {
            return Err(Error::ShapeMismatch(format!("{} query blocks for d = {}", x.len(), self.d())));
        }
        let m = self.m;
        Ok(self.run(|t, psi| {
            for (k, a) in psi.iter_mut().enumerate() {
                if x[t] >> (k / m) & 1 == 1 {
                    *a = -*a;
                }
            }
        }))
    }

    /// Amplitude at arbitrary real query vectors `x_t ∈ ℝ^n`.
    pub fn evaluate_real(&self, x: &[Vec<f64>]) -> Result<C64> {
        if x.len() != self.d() || x.iter().any(|b| b.len() != self.n) {
            return Err(Error::ShapeMismatch("query blocks".into()));
        }
        let m = self.m;
        Ok(self.run(|t, psi| {
            for (k, a) in psi.iter_mut().enumerate() {
                *a *= x[t][k / m];
            }
        }))
    }

    /// `T̂_{i_1..i_d} = ⟨v|U_d (E_{i_d}⊗I) … (E_{i_1}⊗I) U_0|u⟩`.
    pub fn extract_algebraic(&self) -> Result<MultilinearTensor> {
        let (n, m, d) = (self.n, self.m, self.d());
        let mut entries = vec![C64::new(0.0, 0.0); MultilinearTensor::zeros(d, n, Field::Complex)?.entries().len()];
        // depth-first over index prefixes, carrying U_t (E…) … U_0 |u⟩
        let mut stack: Vec<(usize, usize, DVector<C64>)> = vec![(0, 0, &self.unitaries[0] * &self.u)];
        while let Some((depth, prefix, psi)) = stack.pop() {
            if depth == d {
                entries[prefix] = self.v.dotc(&psi);
                continue;
            }
            for i in 0..n {
                let mut proj = DVector::<C64>::zeros(n * m);
                proj.rows_mut(i * m, m).copy_from(&psi.rows(i * m, m));
                stack.push((depth + 1, prefix * n + i, &self.unitaries[depth + 1] * proj));
            }
        }
        MultilinearTensor::from_dense(d, n, Field::Complex, entries)
    }

    /// `T̂_i = E_x[T(x) x_1(i_1)…x_d(i_d)]` over all `2^{nd}` points.
    pub fn extract_enumeration(&self) -> Result<MultilinearTensor> {
        let (n, d) = (self.n, self.d());
        if n * d > ENUMERATION_CAP {
            return Err(Error::CapExceeded {
                what: "enumerated tensor extraction (n·d)",
                n: n * d,
                cap: ENUMERATION_CAP,
            });
        }
        let mut acc = MultilinearTensor::zeros(d, n, Field::Complex)?.entries().to_vec();
        let points = 1u64 << (n * d);
        let mask = (1u64 << n) - 1;
        let mut x = vec![0u64; d];
        for code in 0..points {
            for (t, xt) in x.iter_mut().enumerate() {
                *xt = (code >> (n * t)) & mask;
            }
            let amp = self.evaluate(&x)?;
            // add amp · Π x_t(i_t) to every entry, slot by slot
            let mut vals = vec![amp];
            for &xt in &x {
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
        let scale = 1.0 / points as f64;
        MultilinearTensor::from_dense(d, n, Field::Complex, acc.into_iter().map(|c| c * scale).collect())
    }

    pub fn to_file(&self) -> AlgorithmFile {
        AlgorithmFile {
            n: self.n,
            m: self.m,
            d: self.d(),
            unitaries: self
                .unitaries
                .iter()
                .map(|w| pairs((0..w.nrows()).flat_map(|r| (0..w.ncols()).map(move |c| w[(r, c)]))))
                .collect(),
            u: pairs(self.u.iter().copied()),
            v: pairs(self.v.iter().copied()),
        }
    }

    pub fn from_file(f: &AlgorithmFile) -> Result<Self> {
        let dim = f.n * f.m;
        if f.unitaries.len() != f.d + 1 {
            return Err(Error::Format(format!("{} unitaries for d = {}", f.unitaries.len(), f.d)));
        }
        let unitaries = f
            .unitaries
            .iter()
            .map(|w| {
                if w.len() != dim * dim {
                    return Err(Error::Format(format!("unitary with {} entries, expected {}", w.len(), dim * dim)));
                }
                Ok(DMatrix::from_row_iterator(dim, dim, w.iter().map(|p| C64::new(p[0], p[1]))))
            })
            .collect::<Result<Vec<_>>>()?;
        let vec_of = |v: &[[f64; 2]]| DVector::from_iterator(v.len(), v.iter().map(|p| C64::new(p[0], p[1])));
        Self::new(f.n, f.m, unitaries, vec_of(&f.u), vec_of(&f.v))
    }

    pub fn write_json(&self, w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.to_file())?;
        Ok(())
    }

    pub fn read_json(r: impl Read) -> Result<Self> {
        let f: AlgorithmFile = serde_json::from_reader(r)?;
        Self::from_file(&f)
    }
}

/// Algebraic extraction, cross-checked against enumeration when `n·d` is
/// within [`ENUMERATION_CAP`].
pub fn qqa_extract_tensor(alg: &QueryAlgorithm) -> Result<AmplitudeTensor> {
    let tensor = alg.extract_algebraic()?;
    if alg.n() * alg.d() <= ENUMERATION_CAP {
        let other = alg.extract_enumeration()?;
        let diff = tensor
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if diff > 1e-9 {
            return Err(Error::Invariant(format!("tensor extraction paths differ by {diff:e}")));
        }
    }
    Ok(AmplitudeTensor {
        tensor,
        algorithm: alg.clone(),
    })
}

pub fn qqa_evaluate(alg: &QueryAlgorithm, x: &[u64]) -> Result<C64> {
    alg.evaluate(x)
}

/// `count` uniform points with their exact amplitudes. Points are drawn in
/// chunks of [`STREAM_CHUNK`], chunk `k` from `split_seed(seed, k)`, so the
/// stream does not depend on how chunks are scheduled.
pub fn qqa_sample_stream(alg: &QueryAlgorithm, count: usize, seed: u64) -> Result<Vec<(Vec<u64>, C64)>> {
    let mask = (1u64 << alg.n()) - 1;
    let mut out = Vec::with_capacity(count);
    for chunk in 0..count.div_ceil(STREAM_CHUNK) {
        let mut rng = stream(split_seed(seed, chunk as u64), 0);
        let len = STREAM_CHUNK.min(count - chunk * STREAM_CHUNK);
        for _ in 0..len {
            let x: Vec<u64> = (0..alg.d()).map(|_| rng.random::<u64>() & mask).collect();
            let amp = alg.evaluate(&x)?;
            out.push((x, amp));
        }
    }
    Ok(out)
}
