use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use super::dense::log2_exact;
use super::{Spectrum, ZERO_TOL};
use crate::{Error, Result, C64};

/// Largest `n` for which dense truth tables are built.
pub const BOOLEAN_TABLE_CAP: usize = 24;

/// A subset `s ⊆ [n]` as a bit mask, bit `i` for variable `i`.
///
/// Ordered lexicographically on the digit string `s_0 s_1 … s_{n−1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn singleton(i: usize) -> Self {
        Self(1 << i)
    }

    pub fn from_elements(elems: impl IntoIterator<Item = usize>) -> Self {
        Self(elems.into_iter().fold(0, |m, i| m | 1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.0 >> i & 1 == 1)
    }

    /// `χ_s(x)` where bit `i` of `x` set means `x_i = −1`.
    #[inline]
    pub fn character(self, x: u64) -> f64 {
        if (self.0 & x).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn to_digits(self, n: usize) -> String {
        super::bits_to_string(self.0, n)
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.reverse_bits().cmp(&other.0.reverse_bits())
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.elements().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Scalar field of a Boolean spectrum.
pub trait Coeff:
    Copy
    + Default
    + PartialEq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + Mul<f64, Output = Self>
    + 'static
{
    const FIELD: &'static str;
    fn modulus(self) -> f64;
    fn to_c64(self) -> C64;
    fn from_c64(c: C64) -> Result<Self>;
    fn from_f64(x: f64) -> Self;
}

impl Coeff for f64 {
    const FIELD: &'static str = "real";

    fn modulus(self) -> f64 {
        self.abs()
    }

    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }

    fn from_c64(c: C64) -> Result<Self> {
        if c.im != 0.0 {
            return Err(Error::Format(format!("imaginary part {} in a real spectrum", c.im)));
        }
        Ok(c.re)
    }

    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Coeff for C64 {
    const FIELD: &'static str = "complex";

    fn modulus(self) -> f64 {
        self.norm()
    }

    fn to_c64(self) -> C64 {
        self
    }

    fn from_c64(c: C64) -> Result<Self> {
        Ok(c)
    }

    fn from_f64(x: f64) -> Self {
        C64::new(x, 0.0)
    }
}

/// In-place unnormalized Walsh–Hadamard transform.
pub fn fwht<T: Coeff>(values: &mut [T]) {
    let len = values.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let mut h = 1;
    while h < len {
        for block in values.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

/// Sparse Fourier expansion `f = Σ_s f̂(s) χ_s` on `{−1,1}^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BooleanSpectrum<T: Coeff = f64> {
    n: usize,
    coeffs: BTreeMap<Subset, T>,
    degree: usize,
}

impl<T: Coeff> BooleanSpectrum<T> {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (Subset, T)>) -> Result<Self> {
        if n > 64 {
            return Err(Error::CapExceeded {
                what: "Boolean variables",
                n,
                cap: 64,
            });
        }
        let mut coeffs: BTreeMap<Subset, T> = BTreeMap::new();
        for (s, c) in entries {
            if n < 64 && s.0 >> n != 0 {
                return Err(Error::ShapeMismatch(format!("subset {s:?} outside [{n}]")));
            }
            *coeffs.entry(s).or_default() += c;
        }
        coeffs.retain(|_, c| c.modulus() >= ZERO_TOL);
        let degree = coeffs.keys().map(|s| s.len()).max().unwrap_or(0);
        Ok(Self { n, coeffs, degree })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: Subset) -> T {
        self.coeffs.get(&s).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Subset, &T)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `Σ |f̂(s)|²`.
    pub fn parseval(&self) -> f64 {
        self.coeffs.values().map(|c| c.modulus().powi(2)).sum()
    }

    /// `Σ_s |f̂(s) − ĝ(s)|²`.
    pub fn l2sq_distance(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for (k, c) in &self.coeffs {
            s += (*c - other.get(*k)).modulus().powi(2);
        }
        for (k, c) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                s += c.modulus().powi(2);
            }
        }
        s
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.n, self.coeffs.iter().map(|(s, c)| (*s, *c * factor))).expect("same shape")
    }

    /// Relabels variable `i` as `map[i]` in a register of `n` variables.
    pub fn embed(&self, n: usize, map: &[usize]) -> Result<Self> {
        if map.len() != self.n {
            return Err(Error::ShapeMismatch(format!("{} targets for {} variables", map.len(), self.n)));
        }
        let entries = self
            .coeffs
            .iter()
            .map(|(s, c)| (Subset::from_elements(s.elements().map(|i| map[i])), *c));
        Self::new(n, entries.collect::<Vec<_>>())
    }

    /// `f(x)` at a point, bit `i` of `x` set meaning `x_i = −1`.
    pub fn eval(&self, x: u64) -> T {
        self.coeffs
            .iter()
            .fold(T::default(), |acc, (s, c)| acc + *c * s.character(x))
    }

    /// Dense truth table, entry `x` holding `f(x)`.
    pub fn to_truth_table(&self) -> Result<Vec<T>> {
        if self.n > BOOLEAN_TABLE_CAP {
            return Err(Error::CapExceeded {
                what: "truth table",
                n: self.n,
                cap: BOOLEAN_TABLE_CAP,
            });
        }
        let mut v = vec![T::default(); 1 << self.n];
        for (s, c) in &self.coeffs {
            v[s.0 as usize] = *c;
        }
        fwht(&mut v);
        Ok(v)
    }

    pub fn from_truth_table(table: &[T]) -> Result<Self> {
        let n = log2_exact(table.len())?;
        if n > BOOLEAN_TABLE_CAP {
            return Err(Error::CapExceeded {
                what: "truth table",
                n,
                cap: BOOLEAN_TABLE_CAP,
            });
        }
        let mut v = table.to_vec();
        fwht(&mut v);
        let inv = 1.0 / table.len() as f64;
        Self::new(
            n,
            v.into_iter().enumerate().map(|(s, c)| (Subset(s as u64), c * inv)),
        )
    }

    /// `max_x |f(x)|` by enumeration.
    pub fn sup_norm(&self) -> Result<f64> {
        Ok(self
            .to_truth_table()?
            .into_iter()
            .map(|v| v.modulus())
            .fold(0.0, f64::max))
    }

    /// Every coefficient within `tol` of `2^{1−d}·ℤ`.
    pub fn is_granular(&self, d: usize, tol: f64) -> bool {
        let unit = 2f64.powi(1 - d.max(1) as i32);
        self.coeffs.values().all(|c| {
            let z = c.to_c64();
            let on_grid = |v: f64| (v / unit - (v / unit).round()).abs() * unit <= tol;
            on_grid(z.re) && on_grid(z.im)
        })
    }
}

impl BooleanSpectrum<f64> {
    /// `f(x) ∈ {±1}` for every `x`, within `tol`.
    pub fn is_boolean(&self, tol: f64) -> Result<bool> {
        Ok(self
            .to_truth_table()?
            .iter()
            .all(|v| (v.abs() - 1.0).abs() <= tol))
    }

    pub fn to_complex(&self) -> BooleanSpectrum<C64> {
        BooleanSpectrum::new(self.n, self.coeffs.iter().map(|(s, c)| (*s, C64::new(*c, 0.0))))
            .expect("same shape")
    }
}

impl<T: Coeff> Spectrum for BooleanSpectrum<T> {
    fn moduli(&self) -> Vec<f64> {
        self.coeffs.values().map(|c| c.modulus()).collect()
    }

    fn degree(&self) -> usize {
        self.degree
    }
}

/// Exact coefficients `f̂(s) = E_x[f(x) χ_s(x)]` of a truth table.
pub fn boolean_spectrum(table: &[f64]) -> Result<BooleanSpectrum<f64>> {
    BooleanSpectrum::from_truth_table(table)
}
