//! The Boolean function `f_Φ` on `6n` bits attached to a superoperator.
//!
//! Variable layout: `a^k_i` is bit `(k−1)n + i` and `b^k_j` is bit
//! `3n + (k−1)n + j`, for `k ∈ {1,2,3}`; a set bit means the value `−1`.

use nalgebra::{DMatrix, DVector};

use crate::pauli::{fwht, BooleanSpectrum, PauliString, Subset, SuperopSpectrum};
use crate::{Error, Result, C64};

/// Largest `n` (so `6n ≤ 12` variables).
pub const FPHI_CAP: usize = 2;

fn check_cap(n: usize) -> Result<()> {
    if n > FPHI_CAP {
        return Err(Error::CapExceeded {
            what: "f_Φ construction",
            n,
            cap: FPHI_CAP,
        });
    }
    Ok(())
}

/// Key of the monomial `Π a^{x_i}_i Π b^{y_j}_j`.
pub fn fphi_key(x: &PauliString, y: &PauliString) -> Subset {
    let n = x.n();
    let mut bits = 0u64;
    for (i, &k) in x.word().iter().enumerate() {
        if k != 0 {
            bits |= 1 << ((k as usize - 1) * n + i);
        }
    }
    for (j, &k) in y.word().iter().enumerate() {
        if k != 0 {
            bits |= 1 << (3 * n + (k as usize - 1) * n + j);
        }
    }
    Subset(bits)
}

/// Closed form: coefficient `Φ̂(x,y)/3^{|x|+|y|}` at the key of `(x, y)`.
pub fn f_phi_build(phi: &SuperopSpectrum) -> Result<BooleanSpectrum<C64>> {
    check_cap(phi.n())?;
    let entries = phi
        .iter()
        .map(|((x, y), c)| (fphi_key(x, y), c / 3f64.powi((x.weight() + y.weight()) as i32)));
    BooleanSpectrum::new(6 * phi.n(), entries)
}

/// Eigenvector of `σ_s` with eigenvalue `+1` (`bit = 0`) or `−1` (`bit = 1`).
fn chi(s: usize, bit: u64) -> [C64; 2] {
    let h = 1.0 / 2f64.sqrt();
    let sign = if bit == 1 { -1.0 } else { 1.0 };
    match s {
        1 => [C64::new(h, 0.0), C64::new(sign * h, 0.0)],
        2 => [C64::new(h, 0.0), C64::new(0.0, sign * h)],
        _ => {
            if bit == 0 {
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
            } else {
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
            }
        }
    }
}

/// Product state for per-site codes `2(s−1) + bit`, site 0 most significant.
fn product_state(n: usize, mut code: usize) -> DVector<C64> {
    let mut sites = vec![0usize; n];
    for c in sites.iter_mut().rev() {
        *c = code % 6;
        code /= 6;
    }
    let mut v = DVector::from_element(1, C64::new(1.0, 0.0));
    for c in sites {
        let q = chi(c / 2 + 1, (c % 2) as u64);
        let q = DVector::from_column_slice(&q);
        v = v.kronecker(&q);
    }
    v
}

/// Truth table of `f_Φ` evaluated from its defining average
/// `9^{−n} Σ_{s,t} ⟨α|Φ(|α⟩⟨β|)|β⟩` over product eigenstates, using the dense
/// Choi matrix.
pub fn f_phi_truth_table(phi: &SuperopSpectrum) -> Result<Vec<C64>> {
    let n = phi.n();
    check_cap(n)?;
    let dim = 1usize << n;
    let j = phi.choi_matrix()?;
    let states = 6usize.pow(n as u32);
    let vecs: Vec<DVector<C64>> = (0..states).map(|c| product_state(n, c)).collect();
    // row vectors conj(α_p)α_i and column vectors β_q conj(β_j), indexed (p,i) / (q,j)
    let r = DMatrix::from_fn(states, dim * dim, |c, k| vecs[c][k / dim].conj() * vecs[c][k % dim]);
    let cm = DMatrix::from_fn(dim * dim, states, |k, c| vecs[c][k / dim] * vecs[c][k % dim].conj());
    let g = r * j * cm;

    let vars = 6 * n;
    let bases = 3usize.pow(n as u32);
    let norm = 9f64.powi(n as i32);
    let code_of = |s_code: usize, z: u64, offset: usize| -> usize {
        let mut s_code = s_code;
        let mut s = vec![0usize; n];
        for v in s.iter_mut().rev() {
            *v = s_code % 3 + 1;
            s_code /= 3;
        }
        s.iter().enumerate().fold(0, |acc, (i, &k)| {
            let bit = (z >> (offset + (k - 1) * n + i)) & 1;
            acc * 6 + 2 * (k - 1) + bit as usize
        })
    };
    let mut table = Vec::with_capacity(1 << vars);
    for z in 0..1u64 << vars {
        let alphas: Vec<usize> = (0..bases).map(|s| code_of(s, z, 0)).collect();
        let betas: Vec<usize> = (0..bases).map(|t| code_of(t, z, 3 * n)).collect();
        let mut acc = C64::new(0.0, 0.0);
        for &a in &alphas {
            for &b in &betas {
                acc += g[(a, b)];
            }
        }
        table.push(acc / norm);
    }
    Ok(table)
}

/// `f_Φ` by direct evaluation followed by a Walsh–Hadamard transform; the
/// independent counterpart of [`f_phi_build`].
pub fn f_phi_direct(phi: &SuperopSpectrum) -> Result<BooleanSpectrum<C64>> {
    let mut table = f_phi_truth_table(phi)?;
    let len = table.len() as f64;
    fwht(&mut table);
    let n = 6 * phi.n();
    BooleanSpectrum::new(
        n,
        table.into_iter().enumerate().map(|(s, c)| (Subset(s as u64), c / len)),
    )
}
