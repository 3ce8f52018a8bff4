//! Explicit contractions certifying `‖T‖_cb ≥ Σ_{i_s} √(Σ_{others} |T̂_i|²)`.
//!
//! The Hilbert space has an `e` part with basis `e_j`, `j ∈ [n]^r` for
//! `r ≤ d−s`, and an `f` part with basis `f_k`, `k ∈ [n]^t` for `t < s`.
//! Each `X(i)` prepends `i` to short `e` words, maps words of length `d−s`
//! into the `f` part through the normalized slice of `T̂` at `i_s = i`, and
//! strips a trailing `i` from `f` words. Then
//! `⟨f_∅| Σ T̂_i X(i_1)…X(i_d) |e_∅⟩` equals the bound.

use nalgebra::DMatrix;

use super::tensor::MultilinearTensor;
use crate::{Error, Result, C64};

/// Largest Hilbert-space dimension built densely.
pub const VAROPOULOS_DIM_CAP: usize = 4096;

#[derive(Clone, Debug)]
pub struct VaropoulosWitness {
    /// 1-based slot.
    pub s: usize,
    pub matrices: Vec<DMatrix<C64>>,
    /// `Σ_{i_s} √(Σ_{others} |T̂_i|²)`.
    pub bound: f64,
    /// `‖Σ T̂_i X(i_1)…X(i_d)‖_op`.
    pub evaluated: f64,
    /// Largest `‖X(i)‖_op`.
    pub max_contraction_norm: f64,
}

fn words_up_to(n: usize, len: usize) -> Vec<usize> {
    // offset of the block of words of each length
    let mut offsets = Vec::with_capacity(len + 2);
    let mut acc = 0;
    for r in 0..=len {
        offsets.push(acc);
        acc += n.pow(r as u32);
    }
    offsets.push(acc);
    offsets
}

pub fn varopoulos_contractions(t: &MultilinearTensor, s: usize) -> Result<VaropoulosWitness> {
    let (n, d) = (t.n(), t.d());
    if s == 0 || s > d {
        return Err(Error::InvalidParams(format!("slot {s} outside 1..={d}")));
    }
    let e_len = d - s;
    let f_len = s - 1;
    let e_off = words_up_to(n, e_len);
    let f_off = words_up_to(n, f_len);
    let e_dim = e_off[e_len + 1];
    let dim = e_dim + f_off[f_len + 1];
    if dim > VAROPOULOS_DIM_CAP {
        return Err(Error::CapExceeded {
            what: "Varopoulos Hilbert-space dimension",
            n: dim,
            cap: VAROPOULOS_DIM_CAP,
        });
    }
    let norms = t.slot_norms(s)?;
    let tail = n.pow(e_len as u32);
    let mid = n.pow((e_len + 1) as u32);

    let mut matrices = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = DMatrix::<C64>::zeros(dim, dim);
        // creation on e words shorter than d−s
        for r in 0..e_len {
            for j in 0..n.pow(r as u32) {
                let to = e_off[r + 1] + i * n.pow(r as u32) + j;
                x[(to, e_off[r] + j)] = C64::new(1.0, 0.0);
            }
        }
        // twist from e words of length d−s into f words of length s−1
        if norms[i] > 0.0 {
            for j in 0..tail {
                for k in 0..n.pow(f_len as u32) {
                    let flat = k * mid + i * tail + j;
                    let c = t.entries()[flat].conj() / norms[i];
                    x[(e_dim + f_off[f_len] + k, e_off[e_len] + j)] = c;
                }
            }
        }
        // destruction of a trailing i on nonempty f words
        for tl in 1..=f_len {
            for k in 0..n.pow(tl as u32) {
                if k % n == i {
                    x[(e_dim + f_off[tl - 1] + k / n, e_dim + f_off[tl] + k)] = C64::new(1.0, 0.0);
                }
            }
        }
        matrices.push(x);
    }

    let max_contraction_norm = matrices
        .iter()
        .map(|m| m.singular_values().max())
        .fold(0.0, f64::max);

    let mut total = DMatrix::<C64>::zeros(dim, dim);
    for (flat, c) in t.entries().iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let idx = t.unflat(flat);
        let mut prod = matrices[idx[0]].clone();
        for &i in &idx[1..] {
            prod = &prod * &matrices[i];
        }
        total += prod * *c;
    }
    let evaluated = total.singular_values().max();
    Ok(VaropoulosWitness {
        s,
        matrices,
        bound: norms.iter().sum(),
        evaluated,
        max_contraction_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bh::tensor::Field;
    use crate::rng::stream;

    #[test]
    fn identity_matrix_tensor() {
        let t = MultilinearTensor::from_real(2, 2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let w = varopoulos_contractions(&t, 1).unwrap();
        assert!((w.bound - 2.0).abs() < 1e-12);
        assert!(w.evaluated >= 2.0 - 1e-9);
        assert!(w.max_contraction_norm <= 1.0 + 1e-9);
    }

    #[test]
    fn single_entry_every_slot() {
        let t = MultilinearTensor::single(3, 2, &[0, 0, 0]).unwrap();
        for s in 1..=3 {
            let w = varopoulos_contractions(&t, s).unwrap();
            assert!((w.bound - 1.0).abs() < 1e-12);
            assert!(w.evaluated >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn random_tensor_is_certified() {
        let mut rng = stream(9, 0);
        let t = MultilinearTensor::random_gaussian(2, 3, Field::Complex, &mut rng).unwrap();
        for s in 1..=2 {
            let w = varopoulos_contractions(&t, s).unwrap();
            assert!(w.max_contraction_norm <= 1.0 + 1e-9);
            assert!(w.evaluated >= w.bound - 1e-9);
        }
    }
}
