use crate::pauli::{BooleanSpectrum, Subset};
use crate::{Error, Result};

pub const ADDRESS_MAX_D: usize = 5;

/// Number of input bits of the degree-`d` address function.
pub fn address_bits(d: usize) -> usize {
    2 * (d - 1) + (1 << (d - 1))
}

/// Degree-`d` address function. Bits `2i` and `2i+1` are the two copies
/// `x_i(1), x_i(2)` of address digit `i < d−1`; the pair selects
/// `a_i = −x_i(1)x_i(2)`. The remaining `2^{d−1}` bits are the targets, with
/// target index bit `i` set exactly when `a_i = −1`. The value is the
/// selected target bit times `Π_i x_i(1)`.
pub fn address_function(d: usize) -> Result<BooleanSpectrum<f64>> {
    if d == 0 || d > ADDRESS_MAX_D {
        return Err(Error::CapExceeded {
            what: "address function degree",
            n: d,
            cap: ADDRESS_MAX_D,
        });
    }
    let k = d - 1;
    let n = address_bits(d);
    let weight = 2f64.powi(1 - d as i32);
    let mut entries = Vec::with_capacity(1 << (2 * k));
    for a in 0..1usize << k {
        // expand Π_i (x_i(1) − a_i x_i(2))/2, one choice of factor per digit
        for choice in 0..1usize << k {
            let mut sign = 1.0;
            let mut s = 1u64 << (2 * k + a);
            for i in 0..k {
                if choice >> i & 1 == 1 {
                    s |= 1 << (2 * i + 1);
                    let a_i = if a >> i & 1 == 1 { -1.0 } else { 1.0 };
                    sign *= -a_i;
                } else {
                    s |= 1 << (2 * i);
                }
            }
            entries.push((Subset(s), sign * weight));
        }
    }
    BooleanSpectrum::new(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let f1 = address_function(1).unwrap();
        assert_eq!(f1.n(), 1);
        assert_eq!(f1.get(Subset::singleton(0)), 1.0);
        let f2 = address_function(2).unwrap();
        assert_eq!(f2.len(), 4);
        assert!(f2.iter().all(|(_, c)| (c.abs() - 0.5).abs() < 1e-15));
    }

    #[test]
    fn evaluates_as_a_selector() {
        for d in 2..=4 {
            let f = address_function(d).unwrap();
            let k = d - 1;
            assert!(f.is_boolean(1e-12).unwrap());
            for x in 0..1u64 << f.n() {
                let mut target = 0;
                for i in 0..k {
                    let x1 = x >> (2 * i) & 1;
                    let x2 = x >> (2 * i + 1) & 1;
                    // a_i = −x_i(1)x_i(2) is −1 exactly when the two bits agree
                    if x1 == x2 {
                        target |= 1 << i;
                    }
                }
                let mut y = if x >> (2 * k + target) & 1 == 1 { -1.0 } else { 1.0 };
                for i in 0..k {
                    if x >> (2 * i) & 1 == 1 {
                        y = -y;
                    }
                }
                assert!((f.eval(x) - y).abs() < 1e-12);
            }
        }
    }
}
