use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pauli::{bh_exponent, pnorm_of};
use crate::random::gaussian_c64;
use crate::{Error, Result, C64};

/// Largest number of stored entries `n^d`.
pub const TENSOR_ENTRY_CAP: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

/// Coefficients `T̂_{i_1..i_d}` of a block-multilinear form
/// `T(x_1,…,x_d) = Σ T̂_i x_1(i_1)…x_d(i_d)`, stored densely in row-major
/// order (`i_1` slowest).
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearTensor {
    d: usize,
    n: usize,
    field: Field,
    entries: Vec<C64>,
}

fn checked_len(d: usize, n: usize) -> Result<usize> {
    let mut len = 1usize;
    for _ in 0..d {
        len = len
            .checked_mul(n)
            .filter(|&l| l <= TENSOR_ENTRY_CAP)
            .ok_or(Error::CapExceeded {
                what: "dense tensor entries",
                n,
                cap: TENSOR_ENTRY_CAP,
            })?;
    }
    Ok(len)
}

impl MultilinearTensor {
    pub fn zeros(d: usize, n: usize, field: Field) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::InvalidParams("tensor needs d ≥ 1 and n ≥ 1".into()));
        }
        let len = checked_len(d, n)?;
        Ok(Self {
            d,
            n,
            field,
            entries: vec![C64::new(0.0, 0.0); len],
        })
    }

    /// Dense entries in row-major order.
    pub fn from_dense(d: usize, n: usize, field: Field, entries: Vec<C64>) -> Result<Self> {
        let mut t = Self::zeros(d, n, field)?;
        if entries.len() != t.entries.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for arity {d} and side {n}",
                entries.len()
            )));
        }
        if field == Field::Real && entries.iter().any(|c| c.im != 0.0) {
            return Err(Error::InvalidParams("real tensor with complex entries".into()));
        }
        t.entries = entries;
        Ok(t)
    }

    pub fn from_real(d: usize, n: usize, entries: &[f64]) -> Result<Self> {
        Self::from_dense(d, n, Field::Real, entries.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Sparse construction; repeated indices are summed.
    pub fn from_entries(
        d: usize,
        n: usize,
        field: Field,
        entries: impl IntoIterator<Item = (Vec<usize>, C64)>,
    ) -> Result<Self> {
        let mut t = Self::zeros(d, n, field)?;
        for (idx, c) in entries {
            let k = t.flat(&idx)?;
            t.entries[k] += c;
        }
        if field == Field::Real && t.entries.iter().any(|c| c.im != 0.0) {
            return Err(Error::InvalidParams("real tensor with complex entries".into()));
        }
        Ok(t)
    }

    /// `x_1(i)` for 0-based `i`, all other blocks unused beyond arity `d`.
    pub fn single(d: usize, n: usize, index: &[usize]) -> Result<Self> {
        Self::from_entries(d, n, Field::Real, [(index.to_vec(), C64::new(1.0, 0.0))])
    }

    /// I.i.d. standard Gaussian entries.
    pub fn random_gaussian<R: Rng + ?Sized>(d: usize, n: usize, field: Field, rng: &mut R) -> Result<Self> {
        let mut t = Self::zeros(d, n, field)?;
        for e in &mut t.entries {
            *e = match field {
                Field::Real => C64::new(rng.sample(rand_distr::StandardNormal), 0.0),
                Field::Complex => gaussian_c64(rng),
            };
        }
        Ok(t)
    }

    /// Uniform `±1` entries.
    pub fn random_sign<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Self> {
        let mut t = Self::zeros(d, n, Field::Real)?;
        for e in &mut t.entries {
            *e = C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0);
        }
        Ok(t)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn flat(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.d || index.iter().any(|&i| i >= self.n) {
            return Err(Error::ShapeMismatch(format!(
                "index {index:?} for arity {} and side {}",
                self.d, self.n
            )));
        }
        Ok(index.iter().fold(0, |acc, &i| acc * self.n + i))
    }

    pub fn unflat(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d];
        for slot in idx.iter_mut().rev() {
            *slot = k % self.n;
            k /= self.n;
        }
        idx
    }

    pub fn get(&self, index: &[usize]) -> Result<C64> {
        Ok(self.entries[self.flat(index)?])
    }

    pub fn scale(&self, factor: C64) -> Self {
        let field = if factor.im == 0.0 { self.field } else { Field::Complex };
        Self {
            d: self.d,
            n: self.n,
            field,
            entries: self.entries.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.entries.iter().map(|c| c.norm()).collect()
    }

    pub fn pnorm(&self, p: f64) -> f64 {
        pnorm_of(self.moduli(), p)
    }

    /// `‖T̂‖_{2d/(d+1)}`.
    pub fn bh_norm(&self) -> f64 {
        self.pnorm(bh_exponent(self.d))
    }

    /// `Σ_{i_s} √(Σ_{others} |T̂_i|²)` for 1-based slot `s`.
    pub fn slot_norms(&self, s: usize) -> Result<Vec<f64>> {
        if s == 0 || s > self.d {
            return Err(Error::InvalidParams(format!("slot {s} outside 1..={}", self.d)));
        }
        let inner = self.n.pow((self.d - s) as u32);
        let mut sq = vec![0.0; self.n];
        for (k, c) in self.entries.iter().enumerate() {
            sq[(k / inner) % self.n] += c.norm_sqr();
        }
        Ok(sq.into_iter().map(f64::sqrt).collect())
    }

    /// Evaluates the form at `±1` vertices; bit `i` of `x[t]` set means `x_t(i) = −1`.
    pub fn eval(&self, x: &[u64]) -> Result<C64> {
        if x.len() != self.d {
            return Err(Error::ShapeMismatch(format!("{} blocks for arity {}", x.len(), self.d)));
        }
        let mut v = self.entries.clone();
        for t in (0..self.d).rev() {
            let next: Vec<C64> = v
                .chunks(self.n)
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .map(|(i, c)| if x[t] >> i & 1 == 1 { -c } else { *c })
                        .sum()
                })
                .collect();
            v = next;
        }
        Ok(v[0])
    }

    /// Evaluates at arbitrary vectors `x_t ∈ ℂ^n`.
    pub fn eval_vectors(&self, x: &[Vec<C64>]) -> Result<C64> {
        if x.len() != self.d || x.iter().any(|b| b.len() != self.n) {
            return Err(Error::ShapeMismatch("evaluation blocks".into()));
        }
        let mut v = self.entries.clone();
        for t in (0..self.d).rev() {
            v = v
                .chunks(self.n)
                .map(|row| row.iter().zip(&x[t]).map(|(c, xi)| c * xi).sum())
                .collect();
        }
        Ok(v[0])
    }

    /// CSV with header `i1,…,id,re,im` and one row per entry, 1-based indices.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=self.d).map(|t| format!("i{t}")).collect();
        header.push("re".into());
        header.push("im".into());
        out.write_record(&header).map_err(csv_err)?;
        for (k, c) in self.entries.iter().enumerate() {
            let mut row: Vec<String> = self.unflat(k).into_iter().map(|i| (i + 1).to_string()).collect();
            row.push(format!("{:e}", c.re));
            row.push(format!("{:e}", c.im));
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads [`Self::write_csv`] output; the side is the largest index seen
    /// and every entry must be present. The field is real when all imaginary
    /// parts vanish.
    pub fn read_csv(r: impl Read) -> Result<Self> {
        let mut input = csv::Reader::from_reader(r);
        let header = input.headers().map_err(csv_err)?.clone();
        if header.len() < 3 || &header[header.len() - 2] != "re" || &header[header.len() - 1] != "im" {
            return Err(Error::Format("tensor CSV header must end with re,im".into()));
        }
        let d = header.len() - 2;
        let mut rows = Vec::new();
        let mut n = 0;
        for rec in input.records() {
            let rec = rec.map_err(csv_err)?;
            let idx: Vec<usize> = (0..d)
                .map(|t| rec[t].trim().parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Format(format!("bad index in row {rec:?}")))?;
            let re: f64 = rec[d].trim().parse().map_err(|_| Error::Format("bad re".into()))?;
            let im: f64 = rec[d + 1].trim().parse().map_err(|_| Error::Format("bad im".into()))?;
            n = n.max(idx.iter().copied().max().unwrap_or(0) + 1);
            rows.push((idx, C64::new(re, im)));
        }
        if rows.len() != checked_len(d, n.max(1))? {
            return Err(Error::Format(format!("{} rows for arity {d} and side {n}", rows.len())));
        }
        let field = if rows.iter().all(|(_, c)| c.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        Self::from_entries(d, n, field, rows)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}
