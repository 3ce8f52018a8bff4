//! Gate-level simulation of the primitive circuits for `n ≤ 2`, used to
//! validate the outcome laws the sampler draws from.
//!
//! Qubit 0 is the most significant bit of a basis index.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::block::build_block_encoding;
use super::target::Target;
use super::{Part, SwapTarget};
use crate::pauli::{
    bits_to_string, spectrum_of_operator, spectrum_of_superop, BooleanSpectrum, ChannelInput, DenseOperator,
    PauliString, SuperopSpectrum,
};
use crate::{Error, Result, C64};

pub const CROSS_CHECK_CAP: usize = 2;

/// Outcome label → probability.
pub type Distribution = BTreeMap<String, f64>;

#[derive(Clone, Debug)]
pub enum CrossCheckCase {
    HadamardTest {
        u: DenseOperator,
        x: PauliString,
        part: Part,
    },
    BellSampling {
        u: DenseOperator,
    },
    SwapTest {
        kraus: Vec<DenseOperator>,
        target: SwapTarget,
    },
    ChoiDiag {
        kraus: Vec<DenseOperator>,
    },
    PauliProbe {
        rates: Vec<(PauliString, f64)>,
        s: PauliString,
    },
    FourierSample {
        f: BooleanSpectrum<f64>,
    },
    BlockEncoding {
        p: BooleanSpectrum<f64>,
    },
}

/// Total variation distance over the union of labels.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> f64 {
    let mut keys: Vec<&String> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Returns `(analytic law used by the sampler, law from explicit circuit simulation)`.
pub fn circuit_cross_check(case: &CrossCheckCase) -> Result<(Distribution, Distribution)> {
    match case {
        CrossCheckCase::HadamardTest { u, x, part } => {
            cap(u.n())?;
            let target = Target::Unitary(spectrum_of_operator(u)).checked()?;
            let p = target.hadamard_plus_probability(x, *part)?;
            Ok((pm_law(p), hadamard_circuit(u, x, *part)?))
        }
        CrossCheckCase::BellSampling { u } => {
            cap(u.n())?;
            let target = Target::Unitary(spectrum_of_operator(u)).checked()?;
            let analytic = pauli_law(target.bell_law()?);
            let psi = choi_vector(u);
            Ok((analytic, bell_measure_state(&psi, u.n())))
        }
        CrossCheckCase::ChoiDiag { kraus } => {
            let (spec, rho) = channel_inputs(kraus)?;
            let target = Target::Channel(spec).checked()?;
            let analytic = pauli_law(target.choi_diag_law()?);
            Ok((analytic, bell_measure_density(&rho, kraus[0].n())))
        }
        CrossCheckCase::SwapTest { kraus, target } => {
            let (spec, rho) = channel_inputs(kraus)?;
            let t = Target::Channel(spec).checked()?;
            let p = t.swap_pass_probability(target)?;
            let mut analytic = Distribution::new();
            analytic.insert("0".into(), p);
            analytic.insert("1".into(), 1.0 - p);
            Ok((analytic, swap_circuit(&rho, &reference_state(target, kraus[0].n())?, kraus[0].n())))
        }
        CrossCheckCase::PauliProbe { rates, s } => {
            let n = s.n();
            cap(n)?;
            let spec = SuperopSpectrum::from_pauli_rates(n, rates.iter().cloned())?;
            let t = Target::Channel(spec).checked()?;
            let analytic = t
                .probe_law(s)?
                .into_iter()
                .map(|(r, p)| (bits_to_string(r, n), p))
                .collect();
            Ok((analytic, probe_circuit(rates, s)?))
        }
        CrossCheckCase::FourierSample { f } => {
            cap(f.n())?;
            let t = Target::Boolean(f.clone()).checked()?;
            let mut analytic = Distribution::new();
            analytic.insert("rejected".into(), 0.5);
            for (s, p) in t.fourier_law()? {
                analytic.insert(s.to_digits(f.n()), p / 2.0);
            }
            Ok((analytic, fourier_circuit(f)?))
        }
        CrossCheckCase::BlockEncoding { p } => {
            cap(p.n() + 1)?;
            let t = Target::BoundedPoly(p.clone()).checked()?;
            let analytic = pauli_law(t.block_encoding_law()?);
            let u = build_block_encoding(p)?;
            Ok((analytic, bell_measure_state(&choi_vector(&u), u.n())))
        }
    }
}

fn cap(n: usize) -> Result<()> {
    if n > CROSS_CHECK_CAP {
        return Err(Error::CapExceeded {
            what: "circuit cross-check",
            n,
            cap: CROSS_CHECK_CAP,
        });
    }
    Ok(())
}

fn pm_law(plus: f64) -> Distribution {
    let mut d = Distribution::new();
    d.insert("+1".into(), plus);
    d.insert("-1".into(), 1.0 - plus);
    d
}

fn pauli_law(law: Vec<(PauliString, f64)>) -> Distribution {
    let mut d = Distribution::new();
    for (x, p) in law {
        *d.entry(x.to_string()).or_default() += p;
    }
    d
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn hadamard() -> DMatrix<C64> {
    let h = 1.0 / 2f64.sqrt();
    DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

fn phase_s() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
}

fn cnot() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(r, col)] = c(1.0, 0.0);
    }
    m
}

fn fredkin() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(8, 8);
    for k in 0..8usize {
        let to = if k & 0b100 != 0 {
            // swap the two target bits
            (k & 0b100) | ((k & 1) << 1) | ((k >> 1) & 1)
        } else {
            k
        };
        m[(to, k)] = c(1.0, 0.0);
    }
    m
}

fn controlled(w: &DMatrix<C64>) -> DMatrix<C64> {
    let d = w.nrows();
    let mut m = DMatrix::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(w);
    m
}

/// Lifts `gate` acting on `qubits` (first listed = most significant) to `total` qubits.
fn embed(gate: &DMatrix<C64>, qubits: &[usize], total: usize) -> DMatrix<C64> {
    let dim = 1usize << total;
    let k = qubits.len();
    let pos: Vec<usize> = qubits.iter().map(|&q| total - 1 - q).collect();
    let mask: usize = pos.iter().fold(0, |m, &p| m | 1 << p);
    let mut out = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let sub = (0..k).fold(0, |acc, i| acc | ((col >> pos[i]) & 1) << (k - 1 - i));
        let rest = col & !mask;
        for sub_row in 0..1usize << k {
            let v = gate[(sub_row, sub)];
            if v == C64::default() {
                continue;
            }
            let row = (0..k).fold(rest, |acc, i| acc | ((sub_row >> (k - 1 - i)) & 1) << pos[i]);
            out[(row, col)] += v;
        }
    }
    out
}

/// Circuit preparing `|Ω⟩` on registers `A = offset..offset+n`, `B = offset+n..offset+2n`.
fn epr_prep(n: usize, offset: usize, total: usize) -> DMatrix<C64> {
    let mut g = DMatrix::identity(1 << total, 1 << total);
    for j in 0..n {
        let a = offset + j;
        let b = offset + n + j;
        g = embed(&hadamard(), &[a], total) * g;
        g = embed(&cnot(), &[a, b], total) * g;
    }
    g
}

/// Inverse EPR preparation per pair, mapping Bell states to basis states.
fn bell_unprep(n: usize, offset: usize, total: usize) -> DMatrix<C64> {
    let mut g = DMatrix::identity(1 << total, 1 << total);
    for j in 0..n {
        let a = offset + j;
        let b = offset + n + j;
        g = embed(&cnot(), &[a, b], total) * g;
        g = embed(&hadamard(), &[a], total) * g;
    }
    g
}

fn zero_state(total: usize) -> DVector<C64> {
    let mut v = DVector::zeros(1 << total);
    v[0] = c(1.0, 0.0);
    v
}

/// `(U ⊗ I)|Ω⟩` built gate by gate.
fn choi_vector(u: &DenseOperator) -> DVector<C64> {
    let n = u.n();
    let total = 2 * n;
    let a: Vec<usize> = (0..n).collect();
    let g = embed(u.matrix(), &a, total) * epr_prep(n, 0, total);
    g * zero_state(total)
}

/// Label for Bell outcome `(a, b)` on one pair.
fn bell_label(a: usize, b: usize) -> u8 {
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 0) => 3,
        _ => 2,
    }
}

fn bell_outcome_label(k: usize, n: usize) -> String {
    let total = 2 * n;
    let bit = |q: usize| (k >> (total - 1 - q)) & 1;
    let word = (0..n).map(|j| bell_label(bit(j), bit(n + j))).collect();
    PauliString::new(word).expect("valid symbols").to_string()
}

fn bell_measure_state(psi: &DVector<C64>, n: usize) -> Distribution {
    let out = bell_unprep(n, 0, 2 * n) * psi;
    let mut d = Distribution::new();
    for (k, a) in out.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            *d.entry(bell_outcome_label(k, n)).or_default() += p;
        }
    }
    d.retain(|_, p| *p > 1e-15);
    d
}

fn bell_measure_density(rho: &DMatrix<C64>, n: usize) -> Distribution {
    let g = bell_unprep(n, 0, 2 * n);
    let out = &g * rho * g.adjoint();
    let mut d = Distribution::new();
    for k in 0..out.nrows() {
        let p = out[(k, k)].re;
        *d.entry(bell_outcome_label(k, n)).or_default() += p;
    }
    d.retain(|_, p| *p > 1e-15);
    d
}

/// Spectrum and Choi state `(Φ ⊗ I)(|Ω⟩⟨Ω|)` of a Kraus channel.
fn channel_inputs(kraus: &[DenseOperator]) -> Result<(SuperopSpectrum, DMatrix<C64>)> {
    let n = kraus.first().ok_or(Error::EmptyInput("Kraus list"))?.n();
    cap(n)?;
    let spec = spectrum_of_superop(&ChannelInput::Kraus(kraus.to_vec()), true)?;
    let total = 2 * n;
    let omega = epr_prep(n, 0, total) * zero_state(total);
    let a: Vec<usize> = (0..n).collect();
    let mut rho = DMatrix::zeros(1 << total, 1 << total);
    for k in kraus {
        let v = embed(k.matrix(), &a, total) * &omega;
        rho += &v * v.adjoint();
    }
    Ok((spec, rho))
}

fn bell_vector(x: &PauliString) -> Result<DVector<C64>> {
    Ok(choi_vector(&DenseOperator::pauli(x)?))
}

fn reference_state(target: &SwapTarget, n: usize) -> Result<DMatrix<C64>> {
    let h = 1.0 / 2f64.sqrt();
    let proj = |v: DVector<C64>| &v * v.adjoint();
    let check = |x: &PauliString| {
        if x.n() != n {
            return Err(Error::QubitMismatch {
                expected: n,
                found: x.n(),
            });
        }
        Ok(())
    };
    Ok(match target {
        SwapTarget::Basis(x) => {
            check(x)?;
            proj(bell_vector(x)?)
        }
        SwapTarget::Mixture(x, y) => {
            check(x)?;
            check(y)?;
            (proj(bell_vector(x)?) + proj(bell_vector(y)?)).scale(0.5)
        }
        SwapTarget::RealSuperposition(x, y) => {
            check(x)?;
            check(y)?;
            proj((bell_vector(x)? + bell_vector(y)?) * c(h, 0.0))
        }
        SwapTarget::ImagSuperposition(x, y) => {
            check(x)?;
            check(y)?;
            proj((bell_vector(x)? - bell_vector(y)? * c(0.0, 1.0)) * c(h, 0.0))
        }
    })
}

/// Ancilla, then the Choi state, then the reference state; `CSWAP` between them.
fn swap_circuit(rho: &DMatrix<C64>, sigma: &DMatrix<C64>, n: usize) -> Distribution {
    let reg = 2 * n;
    let total = 1 + 2 * reg;
    let mut anc = DMatrix::zeros(2, 2);
    anc[(0, 0)] = c(1.0, 0.0);
    let state = anc.kronecker(&rho.kronecker(sigma));
    let mut g = embed(&hadamard(), &[0], total);
    for j in 0..reg {
        g = embed(&fredkin(), &[0, 1 + j, 1 + reg + j], total) * g;
    }
    g = embed(&hadamard(), &[0], total) * g;
    let out = &g * state * g.adjoint();
    let half = out.nrows() / 2;
    let p0: f64 = (0..half).map(|k| out[(k, k)].re).sum();
    let mut d = Distribution::new();
    d.insert("0".into(), p0);
    d.insert("1".into(), 1.0 - p0);
    d
}

fn hadamard_circuit(u: &DenseOperator, x: &PauliString, part: Part) -> Result<Distribution> {
    let n = u.n();
    let total = 1 + 2 * n;
    let ctrl_a: Vec<usize> = (0..=n).collect();
    let sigma = DenseOperator::pauli(x)?;
    let mut g = epr_prep(n, 1, total);
    g = embed(&hadamard(), &[0], total) * g;
    if part == Part::Im {
        g = embed(&phase_s(), &[0], total) * g;
    }
    g = embed(&controlled(u.matrix()), &ctrl_a, total) * g;
    g = embed(&controlled(sigma.matrix()), &ctrl_a, total) * g;
    g = embed(&hadamard(), &[0], total) * g;
    let out = g * zero_state(total);
    let half = out.len() / 2;
    let p0: f64 = (0..half).map(|k| out[k].norm_sqr()).sum();
    // with the phase gate the ancilla reads 1 with probability (1 + Im)/2
    let plus = match part {
        Part::Re => p0,
        Part::Im => 1.0 - p0,
    };
    Ok(pm_law(plus))
}

/// Rotation taking the `σ_s` eigenbasis to the computational basis (`+1 ↦ |0⟩`).
fn basis_change(s: u8) -> DMatrix<C64> {
    match s {
        1 => hadamard(),
        2 => hadamard() * phase_s().adjoint(),
        _ => DMatrix::identity(2, 2),
    }
}

fn probe_circuit(rates: &[(PauliString, f64)], s: &PauliString) -> Result<Distribution> {
    let n = s.n();
    if let Some(site) = s.word().iter().position(|&b| b == 0) {
        return Err(Error::IdentityInBasis(site));
    }
    let mut prep = DMatrix::identity(1 << n, 1 << n);
    for j in 0..n {
        prep = embed(&basis_change(s.get(j)).adjoint(), &[j], n) * prep;
    }
    let psi = prep * zero_state(n);
    let rho = &psi * psi.adjoint();
    let mut out = DMatrix::zeros(1 << n, 1 << n);
    for (x, p) in rates {
        let m = DenseOperator::pauli(x)?.into_matrix();
        out += (&m * &rho * &m) * c(*p, 0.0);
    }
    let mut meas = DMatrix::identity(1 << n, 1 << n);
    for j in 0..n {
        meas = embed(&basis_change(s.get(j)), &[j], n) * meas;
    }
    let out = &meas * out * meas.adjoint();
    let mut d = Distribution::new();
    for k in 0..1usize << n {
        let p = out[(k, k)].re;
        if p > 1e-15 {
            let r = (0..n).fold(0u64, |acc, j| acc | (((k >> (n - 1 - j)) & 1) as u64) << j);
            *d.entry(bits_to_string(r, n)).or_default() += p;
        }
    }
    Ok(d)
}

fn fourier_circuit(f: &BooleanSpectrum<f64>) -> Result<Distribution> {
    let n = f.n();
    let total = n + 1;
    let table = f.to_truth_table()?;
    // O_f |x, b⟩ = |x, b ⊕ [f(x) = −1]⟩ with qubit j holding variable j
    let mut oracle = DMatrix::zeros(1 << total, 1 << total);
    for k in 0..1usize << total {
        let xbits = k >> 1;
        let x = (0..n).fold(0usize, |acc, j| acc | ((xbits >> (n - 1 - j)) & 1) << j);
        let flip = usize::from(table[x] < 0.0);
        oracle[(k ^ flip, k)] = c(1.0, 0.0);
    }
    let mut g = DMatrix::identity(1 << total, 1 << total);
    for j in 0..n {
        g = embed(&hadamard(), &[j], total) * g;
    }
    g = oracle * g;
    for j in 0..total {
        g = embed(&hadamard(), &[j], total) * g;
    }
    let out = g * zero_state(total);
    let mut d = Distribution::new();
    for (k, a) in out.iter().enumerate() {
        let p = a.norm_sqr();
        if p <= 1e-15 {
            continue;
        }
        let label = if k & 1 == 0 {
            "rejected".to_string()
        } else {
            let xbits = k >> 1;
            let s = (0..n).fold(0u64, |acc, j| acc | (((xbits >> (n - 1 - j)) & 1) as u64) << j);
            bits_to_string(s, n)
        };
        *d.entry(label).or_default() += p;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn hadamard_sigma1() {
        let u = DenseOperator::pauli(&ps("1")).unwrap();
        let (a, b) = circuit_cross_check(&CrossCheckCase::HadamardTest {
            u,
            x: ps("1"),
            part: Part::Re,
        })
        .unwrap();
        assert!((a["+1"] - 1.0).abs() < 1e-12);
        assert!(tv_distance(&a, &b) < 1e-9);
    }

    #[test]
    fn bell_hadamard_gate() {
        let h = 1.0 / 2f64.sqrt();
        let u = DenseOperator::from_rows(&[&[c(h, 0.0), c(h, 0.0)], &[c(h, 0.0), c(-h, 0.0)]]).unwrap();
        let (a, b) = circuit_cross_check(&CrossCheckCase::BellSampling { u }).unwrap();
        assert!((a["1"] - 0.5).abs() < 1e-12 && (a["3"] - 0.5).abs() < 1e-12);
        assert!(tv_distance(&a, &b) < 1e-9);
    }

    #[test]
    fn cap_enforced() {
        let u = DenseOperator::identity(3).unwrap();
        assert!(matches!(
            circuit_cross_check(&CrossCheckCase::BellSampling { u }),
            Err(Error::CapExceeded { .. })
        ));
    }
}
