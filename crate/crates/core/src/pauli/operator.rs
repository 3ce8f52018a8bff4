use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::dense::{Caps, DenseOperator};
use super::string::{strings_up_to_weight, BasisAction, PauliString};
use super::{Spectrum, ZERO_TOL};
use crate::{Error, Result, C64};

/// Sparse Pauli expansion `M = Σ_x M̂(x) σ_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpectrum {
    n: usize,
    coeffs: BTreeMap<PauliString, C64>,
    degree: usize,
}

impl OperatorSpectrum {
    /// Builds a spectrum, summing repeated keys and dropping near-zero entries.
    pub fn new(n: usize, entries: impl IntoIterator<Item = (PauliString, C64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        let mut coeffs: BTreeMap<PauliString, C64> = BTreeMap::new();
        for (x, c) in entries {
            if x.n() != n {
                return Err(Error::QubitMismatch {
                    expected: n,
                    found: x.n(),
                });
            }
            *coeffs.entry(x).or_default() += c;
        }
        coeffs.retain(|_, c| c.norm() >= ZERO_TOL);
        let degree = coeffs.keys().map(|x| x.weight()).max().unwrap_or(0);
        Ok(Self { n, coeffs, degree })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, [(PauliString::identity(n), C64::new(1.0, 0.0))]).expect("n >= 1")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: &PauliString) -> C64 {
        self.coeffs.get(x).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &C64)> {
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

    /// `Σ |M̂(x)|²`, which equals `‖M‖_2²` with the normalized trace.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// `‖M̂ − N̂‖_2`.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for (x, c) in &self.coeffs {
            s += (c - other.get(x)).norm_sqr();
        }
        for (x, c) in &other.coeffs {
            if !self.coeffs.contains_key(x) {
                s += c.norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::new(self.n, self.coeffs.iter().map(|(x, c)| (x.clone(), c * factor)))
            .expect("same shape")
    }

    /// Places this spectrum on `sites` of an `n`-qubit register.
    pub fn embed(&self, n: usize, sites: &[usize]) -> Result<Self> {
        let entries = self
            .coeffs
            .iter()
            .map(|(x, c)| Ok((x.embed(n, sites)?, *c)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, entries)
    }

    /// Dense synthesis `Σ M̂(x) σ_x`.
    pub fn to_dense(&self) -> Result<DenseOperator> {
        self.to_dense_with_cap(Caps::default().dense_qubits)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<DenseOperator> {
        if self.n > cap {
            return Err(Error::CapExceeded {
                what: "dense synthesis",
                n: self.n,
                cap,
            });
        }
        let dim = 1usize << self.n;
        let mut mat = DMatrix::<C64>::zeros(dim, dim);
        for (x, c) in &self.coeffs {
            let act = BasisAction::new(x);
            for col in 0..dim {
                let (row, ph) = act.apply(col);
                mat[(row, col)] += c * ph;
            }
        }
        DenseOperator::with_cap(mat, cap)
    }

    /// `σ_x`-products under the Pauli algebra: `(Σ Â σ)(Σ B̂ σ)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (x, a) in &self.coeffs {
            for (y, b) in &other.coeffs {
                let (z, ph) = x.mul(y);
                out.push((z, a * b * ph));
            }
        }
        Self::new(self.n, out)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.n, self.coeffs.iter().map(|(x, c)| (x.clone(), c.conj()))).expect("same shape")
    }
}

impl Spectrum for OperatorSpectrum {
    fn moduli(&self) -> Vec<f64> {
        self.coeffs.values().map(|c| c.norm()).collect()
    }

    fn degree(&self) -> usize {
        self.degree
    }
}

/// Exact coefficients `M̂(x) = Tr[σ_x M]/N` for all `4^n` strings.
pub fn spectrum_of_operator(m: &DenseOperator) -> OperatorSpectrum {
    let n = m.n();
    spectrum_of_operator_restricted(m, &strings_up_to_weight(n, n))
}

/// [`spectrum_of_operator`] evaluated only on the listed keys.
pub fn spectrum_of_operator_restricted(m: &DenseOperator, keys: &[PauliString]) -> OperatorSpectrum {
    let n = m.n();
    let dim = m.dim();
    let mat = m.matrix();
    let inv = 1.0 / dim as f64;
    let entries = keys.iter().map(|x| {
        let act = BasisAction::new(x);
        // Tr[σ_x M] = Σ_b ⟨b ⊕ f|σ_x|b⟩ M[b, b ⊕ f]
        let mut tr = C64::default();
        for b in 0..dim {
            let (row, ph) = act.apply(b);
            tr += ph * mat[(b, row)];
        }
        (x.clone(), tr * inv)
    });
    OperatorSpectrum::new(n, entries.collect::<Vec<_>>()).expect("keys match n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn identity_and_z() {
        let s = spectrum_of_operator(&DenseOperator::identity(2).unwrap());
        assert_eq!(s, OperatorSpectrum::identity(2));
        let z = spectrum_of_operator(&DenseOperator::pauli(&ps("3")).unwrap());
        assert_eq!(z.len(), 1);
        assert!((z.get(&ps("3")) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hadamard() {
        let h = 1.0 / 2f64.sqrt();
        let m = DenseOperator::from_rows(&[&[c(h, 0.0), c(h, 0.0)], &[c(h, 0.0), c(-h, 0.0)]]).unwrap();
        let s = spectrum_of_operator(&m);
        assert_eq!(s.len(), 2);
        assert!((s.get(&ps("1")) - c(h, 0.0)).norm() < 1e-15);
        assert!((s.get(&ps("3")) - c(h, 0.0)).norm() < 1e-15);
        assert_eq!(s.degree(), 1);
    }

    #[test]
    fn y_coefficient_is_real_for_sigma_y() {
        let y = spectrum_of_operator(&DenseOperator::pauli(&ps("02")).unwrap());
        assert!((y.get(&ps("02")) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn algebra_matches_dense_product() {
        let a = OperatorSpectrum::new(2, [(ps("12"), c(0.3, 0.1)), (ps("30"), c(-0.5, 0.0))]).unwrap();
        let b = OperatorSpectrum::new(2, [(ps("21"), c(0.2, -0.4)), (ps("00"), c(1.0, 0.0))]).unwrap();
        let prod = a.mul(&b).unwrap().to_dense().unwrap();
        let dense = a.to_dense().unwrap().mul(&b.to_dense().unwrap()).unwrap();
        assert!(prod.max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn zero_tolerance_drops_tiny_entries() {
        let s = OperatorSpectrum::new(1, [(ps("1"), c(1e-13, 0.0)), (ps("3"), c(0.5, 0.0))]).unwrap();
        assert_eq!(s.len(), 1);
        assert!(OperatorSpectrum::new(2, [(ps("1"), c(1.0, 0.0))]).is_err());
    }
}
