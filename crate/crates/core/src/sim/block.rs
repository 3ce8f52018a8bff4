//! Block encodings `U_p = σ3 ⊗ Diag(p) + σ2 ⊗ Diag(√(1−p²))` of bounded functions.
//!
//! Site 0 carries the `σ3/σ2` factor; site `1+i` is variable `i`.

use nalgebra::DMatrix;

use crate::pauli::{BooleanSpectrum, DenseOperator, OperatorSpectrum, PauliString, Subset, BOOLEAN_TABLE_CAP};
use crate::{Error, Result, C64};

/// Slack allowed on `‖p‖_∞ ≤ 1` before a function counts as unbounded.
pub const BOUND_TOL: f64 = 1e-9;

/// Truth table of `p`, checked to lie in `[−1, 1]`.
pub fn bounded_table(p: &BooleanSpectrum<f64>) -> Result<Vec<f64>> {
    let table = p.to_truth_table()?;
    let sup = table.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup > 1.0 + BOUND_TOL {
        return Err(Error::Unbounded(sup));
    }
    Ok(table)
}

/// Dense `U_p` on `n+1` qubits.
pub fn build_block_encoding(p: &BooleanSpectrum<f64>) -> Result<DenseOperator> {
    let n = p.n();
    let table = bounded_table(p)?;
    let dim = 1usize << n;
    let mut m = DMatrix::<C64>::zeros(2 * dim, 2 * dim);
    for (k, &v) in table.iter().enumerate() {
        let v = v.clamp(-1.0, 1.0);
        let q = (1.0 - v * v).max(0.0).sqrt();
        // basis index k has site i (variable i) at bit n−1−i; table index has it at bit i
        let idx = reverse_low_bits(k, n);
        m[(idx, idx)] = C64::new(v, 0.0);
        m[(dim + idx, dim + idx)] = C64::new(-v, 0.0);
        m[(idx, dim + idx)] = C64::new(0.0, -q);
        m[(dim + idx, idx)] = C64::new(0.0, q);
    }
    let u = DenseOperator::new(m)?;
    u.ensure_unitary(1e-9)?;
    Ok(u)
}

/// Pauli spectrum of `U_p` on `n+1` sites, computed without a dense matrix.
pub fn block_encoding_spectrum(p: &BooleanSpectrum<f64>) -> Result<OperatorSpectrum> {
    let n = p.n();
    if n > BOOLEAN_TABLE_CAP {
        return Err(Error::CapExceeded {
            what: "block encoding",
            n,
            cap: BOOLEAN_TABLE_CAP,
        });
    }
    let table = bounded_table(p)?;
    let q_table: Vec<f64> = table.iter().map(|v| (1.0 - v * v).max(0.0).sqrt()).collect();
    let q = BooleanSpectrum::from_truth_table(&q_table)?;
    let mut entries = Vec::with_capacity(p.len() + q.len());
    for (s, c) in p.iter() {
        entries.push((sector_key(n, 3, *s), C64::new(*c, 0.0)));
    }
    for (s, c) in q.iter() {
        entries.push((sector_key(n, 2, *s), C64::new(*c, 0.0)));
    }
    OperatorSpectrum::new(n + 1, entries)
}

/// `(lead) × z_s` with `σ3` on sites `1+i` for `i ∈ s`.
pub fn sector_key(n: usize, lead: u8, s: Subset) -> PauliString {
    let mut word = vec![0u8; n + 1];
    word[0] = lead;
    for i in s.elements() {
        word[1 + i] = 3;
    }
    PauliString::new(word).expect("valid symbols")
}

/// `s_x` for `x ∈ {3}×{0,3}^n`; `None` outside that sector.
pub fn subset_of_sector(x: &PauliString) -> Option<Subset> {
    let w = x.word();
    if w[0] != 3 || w[1..].iter().any(|&b| b != 0 && b != 3) {
        return None;
    }
    Some(Subset::from_elements(
        w[1..].iter().enumerate().filter(|(_, &b)| b == 3).map(|(i, _)| i),
    ))
}

fn reverse_low_bits(k: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, i| acc | ((k >> i) & 1) << (n - 1 - i))
}
