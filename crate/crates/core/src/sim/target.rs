//! Hidden ground truths and the exact outcome laws of each primitive on them.

use std::collections::BTreeMap;

use super::block::{block_encoding_spectrum, BOUND_TOL};
use super::{Part, Primitive, SwapTarget};
use crate::pauli::{
    star_unchecked, BooleanSpectrum, OperatorSpectrum, PauliString, Subset, SuperopSpectrum, BOOLEAN_TABLE_CAP,
};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub enum Target {
    Channel(SuperopSpectrum),
    Unitary(OperatorSpectrum),
    /// `±1`-valued function.
    Boolean(BooleanSpectrum<f64>),
    /// Function into `[−1, 1]`.
    BoundedPoly(BooleanSpectrum<f64>),
}

impl Target {
    /// Validates the ground truth for its kind.
    pub fn checked(self) -> Result<Self> {
        match &self {
            Target::Channel(s) => s.check_channel(1e-9)?,
            Target::Unitary(u) => {
                let dev = (u.norm_sq() - 1.0).abs();
                if dev > 1e-9 {
                    return Err(Error::NotUnitary(dev));
                }
            }
            Target::Boolean(f) => {
                if f.n() <= BOOLEAN_TABLE_CAP {
                    if !f.is_boolean(1e-9)? {
                        return Err(Error::NotBoolean);
                    }
                } else if (f.parseval() - 1.0).abs() > 1e-9 {
                    return Err(Error::NotBoolean);
                }
            }
            Target::BoundedPoly(p) => {
                if p.n() <= BOOLEAN_TABLE_CAP {
                    let sup = p.sup_norm()?;
                    if sup > 1.0 + BOUND_TOL {
                        return Err(Error::Unbounded(sup));
                    }
                }
            }
        }
        Ok(self)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Target::Channel(_) => "channel",
            Target::Unitary(_) => "unitary",
            Target::Boolean(_) => "boolean",
            Target::BoundedPoly(_) => "bounded polynomial",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Target::Channel(s) => s.n(),
            Target::Unitary(u) => u.n(),
            Target::Boolean(f) | Target::BoundedPoly(f) => f.n(),
        }
    }

    fn wrong(&self, primitive: Primitive) -> Error {
        Error::WrongTarget {
            primitive,
            target: self.kind(),
        }
    }

    fn channel(&self, primitive: Primitive) -> Result<&SuperopSpectrum> {
        match self {
            Target::Channel(s) => Ok(s),
            _ => Err(self.wrong(primitive)),
        }
    }

    fn unitary(&self, primitive: Primitive) -> Result<&OperatorSpectrum> {
        match self {
            Target::Unitary(u) => Ok(u),
            _ => Err(self.wrong(primitive)),
        }
    }

    /// `x ↦ Φ̂(x,x)`.
    pub fn choi_diag_law(&self) -> Result<Vec<(PauliString, f64)>> {
        let s = self.channel(Primitive::ChoiDiag)?;
        Ok(s.diagonal().into_iter().map(|(x, p)| (x, p.max(0.0))).collect())
    }

    /// Probability that the SWAP test against `target` reports "same",
    /// `(1 + Tr[v(Φ) ρ'])/2`.
    pub fn swap_pass_probability(&self, target: &SwapTarget) -> Result<f64> {
        let s = self.channel(Primitive::SwapTest)?;
        let overlap = match target {
            SwapTarget::Basis(x) => s.get(x, x).re,
            SwapTarget::Mixture(x, y) => 0.5 * (s.get(x, x).re + s.get(y, y).re),
            SwapTarget::RealSuperposition(x, y) => 0.5 * (s.get(x, x).re + s.get(y, y).re) + s.get(x, y).re,
            SwapTarget::ImagSuperposition(x, y) => 0.5 * (s.get(x, x).re + s.get(y, y).re) + s.get(x, y).im,
        };
        Ok(((1.0 + overlap) / 2.0).clamp(0.0, 1.0))
    }

    /// `x ↦ |Û(x)|²`.
    pub fn bell_law(&self) -> Result<Vec<(PauliString, f64)>> {
        let u = self.unitary(Primitive::BellUnitary)?;
        Ok(u.iter().map(|(x, c)| (x.clone(), c.norm_sqr())).collect())
    }

    /// Probability of the `+1` outcome, `(1 + Re Û(x))/2` or `(1 + Im Û(x))/2`.
    pub fn hadamard_plus_probability(&self, x: &PauliString, part: Part) -> Result<f64> {
        let u = self.unitary(Primitive::HadamardTest)?;
        let c = u.get(x);
        let v = match part {
            Part::Re => c.re,
            Part::Im => c.im,
        };
        Ok(((1.0 + v) / 2.0).clamp(0.0, 1.0))
    }

    /// Law of `r = s⋆x` with `x` drawn from the error rates.
    pub fn probe_law(&self, s: &PauliString) -> Result<Vec<(u64, f64)>> {
        let ch = self.channel(Primitive::PauliProbe)?;
        if !ch.is_pauli_channel() {
            return Err(self.wrong(Primitive::PauliProbe));
        }
        if s.n() != ch.n() {
            return Err(Error::QubitMismatch {
                expected: ch.n(),
                found: s.n(),
            });
        }
        if let Some(site) = s.word().iter().position(|&b| b == 0) {
            return Err(Error::IdentityInBasis(site));
        }
        let mut law: BTreeMap<u64, f64> = BTreeMap::new();
        for (x, p) in ch.diagonal() {
            *law.entry(star_unchecked(s.word(), x.word())).or_default() += p.max(0.0);
        }
        Ok(law.into_iter().collect())
    }

    /// `S ↦ f̂(S)²`, the law of a post-selected Fourier sample.
    pub fn fourier_law(&self) -> Result<Vec<(Subset, f64)>> {
        match self {
            Target::Boolean(f) => Ok(f.iter().map(|(s, c)| (*s, c * c)).collect()),
            _ => Err(self.wrong(Primitive::FourierSample)),
        }
    }

    pub fn function(&self) -> Result<&BooleanSpectrum<f64>> {
        match self {
            Target::Boolean(f) | Target::BoundedPoly(f) => Ok(f),
            _ => Err(self.wrong(Primitive::ClassicalExample)),
        }
    }

    /// `x ↦ |Û_p(x)|²` for the block encoding of the target function.
    pub fn block_encoding_law(&self) -> Result<Vec<(PauliString, f64)>> {
        match self {
            Target::BoundedPoly(p) | Target::Boolean(p) => {
                let u = block_encoding_spectrum(p)?;
                Ok(u.iter().map(|(x, c)| (x.clone(), c.norm_sqr())).collect())
            }
            _ => Err(self.wrong(Primitive::BlockEncodingCj)),
        }
    }
}
