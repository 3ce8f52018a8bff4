//! Pauli strings and the sparse spectra indexed by them.

mod boolean;
mod dense;
pub mod io;
mod operator;
mod string;
mod superop;

pub use boolean::{boolean_spectrum, fwht, BooleanSpectrum, Coeff, Subset, BOOLEAN_TABLE_CAP};
pub use dense::{choi_state_of_unitary, Caps, DenseOperator, DenseState};
pub use operator::{spectrum_of_operator, OperatorSpectrum};
pub use string::{
    bits_from_str, bits_to_string, count_up_to_weight, site_commutes, site_product, star,
    star_unchecked, strings_up_to_weight, weight, BasisAction, PauliString,
};
pub use superop::{spectrum_of_superop, ChannelFlag, ChannelInput, SuperopSpectrum, CHANNEL_TOL};

/// Coefficients with modulus below this are dropped on construction.
pub const ZERO_TOL: f64 = 1e-12;

/// Norm and degree queries shared by all spectrum types.
pub trait Spectrum {
    /// Moduli of the stored coefficients, in key order.
    fn moduli(&self) -> Vec<f64>;

    fn degree(&self) -> usize;

    /// `(Σ |c|^p)^{1/p}` over the stored coefficients.
    fn pnorm(&self, p: f64) -> f64 {
        pnorm_of(self.moduli(), p)
    }
}

/// `ℓ_p` norm of a list of moduli; `p = ∞` gives the max.
pub fn pnorm_of(moduli: impl IntoIterator<Item = f64>, p: f64) -> f64 {
    assert!(p >= 1.0, "p-norm needs p >= 1, got {p}");
    if p.is_infinite() {
        return moduli.into_iter().fold(0.0, f64::max);
    }
    // scale by the max to keep small/large entries from under/overflowing
    let v: Vec<f64> = moduli.into_iter().collect();
    let max = v.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let s: f64 = v.iter().map(|m| (m / max).powf(p)).sum();
    max * s.powf(1.0 / p)
}

/// The Bohnenblust–Hille exponent `2d/(d+1)`; `d = 0` is treated as `d = 1`.
pub fn bh_exponent(d: usize) -> f64 {
    let d = d.max(1) as f64;
    2.0 * d / (d + 1.0)
}
