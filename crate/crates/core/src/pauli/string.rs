use std::fmt;
use std::str::FromStr;

use crate::{Error, Result, C64};

/// An `n`-site word over `{0,1,2,3}` naming `σ_{x_1} ⊗ … ⊗ σ_{x_n}`.
///
/// Ordering is lexicographic on the word; `weight` is derived and cached.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    word: Vec<u8>,
    weight: usize,
}

/// Single-site product `σ_a σ_b = phase · σ_c`, returned as `(c, phase)`.
pub fn site_product(a: u8, b: u8) -> (u8, C64) {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match (a, b) {
        (0, b) => (b, one),
        (a, 0) => (a, one),
        (a, b) if a == b => (0, one),
        (1, 2) => (3, i),
        (2, 3) => (1, i),
        (3, 1) => (2, i),
        (2, 1) => (3, -i),
        (3, 2) => (1, -i),
        (1, 3) => (2, -i),
        _ => unreachable!("symbols are validated on construction"),
    }
}

/// Whether single-site Paulis `σ_a` and `σ_b` commute.
#[inline]
pub fn site_commutes(a: u8, b: u8) -> bool {
    a == 0 || b == 0 || a == b
}

impl PauliString {
    pub fn new(word: Vec<u8>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidPauliString("empty word".into()));
        }
        if let Some(&bad) = word.iter().find(|&&s| s > 3) {
            return Err(Error::InvalidPauliSymbol(bad));
        }
        let weight = word.iter().filter(|&&s| s != 0).count();
        Ok(Self { word, weight })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "a Pauli string needs at least one site");
        Self {
            word: vec![0; n],
            weight: 0,
        }
    }

    /// Single non-identity symbol `symbol` at `site`.
    pub fn single(n: usize, site: usize, symbol: u8) -> Result<Self> {
        let mut word = vec![0; n];
        if site >= n {
            return Err(Error::InvalidPauliString(format!("site {site} out of range for n = {n}")));
        }
        word[site] = symbol;
        Self::new(word)
    }

    /// Decodes a base-4 index, site 0 most significant.
    pub fn from_index(n: usize, mut index: u64) -> Self {
        let mut word = vec![0u8; n];
        for site in (0..n).rev() {
            word[site] = (index & 3) as u8;
            index >>= 2;
        }
        let weight = word.iter().filter(|&&s| s != 0).count();
        Self { word, weight }
    }

    /// Base-4 index, site 0 most significant; matches lexicographic order.
    pub fn index(&self) -> u64 {
        self.word.iter().fold(0u64, |acc, &s| (acc << 2) | s as u64)
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    /// Number of non-identity sites, `|x|`.
    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn get(&self, site: usize) -> u8 {
        self.word[site]
    }

    pub fn is_identity(&self) -> bool {
        self.weight == 0
    }

    /// Sites carrying a non-identity symbol.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.word
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0)
            .map(|(i, _)| i)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n(), other.n());
        self.word
            .iter()
            .zip(&other.word)
            .filter(|(&a, &b)| !site_commutes(a, b))
            .count()
            % 2
            == 0
    }

    /// `σ_self σ_other = phase · σ_result`.
    pub fn mul(&self, other: &Self) -> (PauliString, C64) {
        debug_assert_eq!(self.n(), other.n());
        let mut phase = C64::new(1.0, 0.0);
        let word = self
            .word
            .iter()
            .zip(&other.word)
            .map(|(&a, &b)| {
                let (c, p) = site_product(a, b);
                phase *= p;
                c
            })
            .collect::<Vec<_>>();
        let weight = word.iter().filter(|&&s| s != 0).count();
        (Self { word, weight }, phase)
    }

    /// Places this string on `sites` of an `n`-site register, identity elsewhere.
    pub fn embed(&self, n: usize, sites: &[usize]) -> Result<Self> {
        if sites.len() != self.n() {
            return Err(Error::ShapeMismatch(format!(
                "{} sites given for a {}-site string",
                sites.len(),
                self.n()
            )));
        }
        let mut word = vec![0u8; n];
        for (&site, &sym) in sites.iter().zip(&self.word) {
            if site >= n {
                return Err(Error::InvalidPauliString(format!("site {site} out of range for n = {n}")));
            }
            word[site] = sym;
        }
        Self::new(word)
    }

    /// Bit flips of `σ_x` on a computational-basis index (site 0 is the most
    /// significant bit).
    pub(crate) fn flip_mask(&self) -> usize {
        let n = self.n();
        self.word
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1 || s == 2)
            .fold(0, |m, (j, _)| m | 1 << (n - 1 - j))
    }

    /// Sites whose action carries a sign depending on the input bit (σ2, σ3).
    pub(crate) fn sign_mask(&self) -> usize {
        let n = self.n();
        self.word
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 2 || s == 3)
            .fold(0, |m, (j, _)| m | 1 << (n - 1 - j))
    }

    pub(crate) fn y_count(&self) -> usize {
        self.word.iter().filter(|&&s| s == 2).count()
    }

    /// Returns `(row, phase)` with `σ_x |col⟩ = phase · |row⟩`.
    #[inline]
    pub fn act(&self, col: usize) -> (usize, C64) {
        let action = BasisAction::new(self);
        action.apply(col)
    }
}

/// Precomputed signed-permutation action of a Pauli string on basis states.
#[derive(Clone, Copy, Debug)]
pub struct BasisAction {
    flip: usize,
    sign: usize,
    base: C64,
}

impl BasisAction {
    pub fn new(x: &PauliString) -> Self {
        let base = match x.y_count() % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        Self {
            flip: x.flip_mask(),
            sign: x.sign_mask(),
            base,
        }
    }

    /// `σ_x |col⟩ = phase · |row⟩`.
    #[inline]
    pub fn apply(&self, col: usize) -> (usize, C64) {
        let phase = if (col & self.sign).count_ones() % 2 == 0 {
            self.base
        } else {
            -self.base
        };
        (col ^ self.flip, phase)
    }

    pub fn flip(&self) -> usize {
        self.flip
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.word {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .chars()
            .map(|c| match c {
                '0'..='3' => Ok(c as u8 - b'0'),
                'I' => Ok(0),
                'X' => Ok(1),
                'Y' => Ok(2),
                'Z' => Ok(3),
                _ => Err(Error::InvalidPauliString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(word)
    }
}

impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of non-identity sites of `x`.
pub fn weight(x: &PauliString) -> usize {
    x.weight()
}

/// Commutation pattern of a basis string `s ∈ {1,2,3}^n` against `x`:
/// bit `j` is 0 iff `σ_{s_j}` and `σ_{x_j}` commute.
pub fn star(s: &PauliString, x: &PauliString) -> Result<u64> {
    if s.n() != x.n() {
        return Err(Error::QubitMismatch {
            expected: s.n(),
            found: x.n(),
        });
    }
    if let Some(site) = s.word().iter().position(|&b| b == 0) {
        return Err(Error::IdentityInBasis(site));
    }
    Ok(star_unchecked(s.word(), x.word()))
}

/// [`star`] on raw words, without validation. Bit `j` of the result is site `j`.
#[inline]
pub fn star_unchecked(s: &[u8], x: &[u8]) -> u64 {
    s.iter()
        .zip(x)
        .enumerate()
        .filter(|(_, (&a, &b))| !site_commutes(a, b))
        .fold(0u64, |acc, (j, _)| acc | 1 << j)
}

/// Renders a site-indexed bit mask as a digit string, site 0 first.
pub fn bits_to_string(bits: u64, n: usize) -> String {
    (0..n)
        .map(|j| if bits >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a digit string (site 0 first) into a site-indexed bit mask.
pub fn bits_from_str(s: &str) -> Result<u64> {
    if s.len() > 64 {
        return Err(Error::Format(format!("bit string longer than 64: {s}")));
    }
    s.chars().enumerate().try_fold(0u64, |acc, (j, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << j),
        _ => Err(Error::Format(format!("bad bit string {s}"))),
    })
}

/// All strings of length `n` with weight at most `d`, in lexicographic order.
pub fn strings_up_to_weight(n: usize, d: usize) -> Vec<PauliString> {
    let mut out = Vec::new();
    let mut word = vec![0u8; n];
    fn rec(site: usize, left: usize, word: &mut Vec<u8>, out: &mut Vec<PauliString>) {
        if site == word.len() {
            out.push(PauliString::new(word.clone()).expect("valid symbols"));
            return;
        }
        for sym in 0..4u8 {
            if sym != 0 && left == 0 {
                break;
            }
            word[site] = sym;
            rec(site + 1, if sym == 0 { left } else { left - 1 }, word, out);
        }
        word[site] = 0;
    }
    rec(0, d, &mut word, &mut out);
    out
}

/// `Σ_{i ≤ d} C(n,i) 3^i`, saturating.
pub fn count_up_to_weight(n: usize, d: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    let mut pow3: u128 = 1;
    for i in 0..=d.min(n) {
        total = total.saturating_add(binom.saturating_mul(pow3));
        binom = binom.saturating_mul((n - i) as u128) / (i as u128 + 1);
        pow3 = pow3.saturating_mul(3);
    }
    total
}
