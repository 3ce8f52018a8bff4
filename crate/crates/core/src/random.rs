//! Random instances whose degree is exact by construction.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::pauli::{
    spectrum_of_operator, BooleanSpectrum, DenseOperator, OperatorSpectrum, PauliString, Subset, SuperopSpectrum,
};
use crate::{Error, Result, C64};

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) / 2f64.sqrt()
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let z = DMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// `k` distinct sites out of `n`, sorted.
pub fn random_sites<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut v = sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

/// Uniformly random string of weight exactly `w` on `n` sites.
pub fn random_pauli_of_weight<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> PauliString {
    let mut word = vec![0u8; n];
    for site in random_sites(n, w, rng) {
        word[site] = rng.random_range(1..=3);
    }
    PauliString::new(word).expect("valid symbols")
}

/// Pauli channel with `sparsity` error strings of weight `≤ max_weight`
/// (superoperator degree `≤ 2·max_weight`). The identity always carries the
/// largest rate.
pub fn random_pauli_mixture<R: Rng + ?Sized>(
    n: usize,
    max_weight: usize,
    sparsity: usize,
    rng: &mut R,
) -> Result<SuperopSpectrum> {
    if sparsity == 0 {
        return Err(Error::InvalidParams("sparsity must be positive".into()));
    }
    let mut strings = vec![PauliString::identity(n)];
    let mut guard = 0;
    while strings.len() < sparsity && guard < 10_000 {
        guard += 1;
        let w = rng.random_range(1..=max_weight.max(1).min(n));
        let x = random_pauli_of_weight(n, w, rng);
        if !strings.contains(&x) {
            strings.push(x);
        }
    }
    let mut w: Vec<f64> = strings.iter().map(|_| rng.random_range(0.05..1.0)).collect();
    let top = w.iter().copied().fold(0.0, f64::max);
    w[0] = top + rng.random_range(0.5..1.5);
    let total: f64 = w.iter().sum();
    SuperopSpectrum::from_pauli_rates(n, strings.into_iter().zip(w.into_iter().map(|v| v / total)))
}

/// Haar unitary on `k` random sites of `n`, degree `≤ k`.
pub fn random_junta_unitary<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<(OperatorSpectrum, Vec<usize>)> {
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!("junta size {k} for n = {n}")));
    }
    let sites = random_sites(n, k, rng);
    let u = DenseOperator::new(haar_unitary(1 << k, rng))?;
    Ok((spectrum_of_operator(&u).embed(n, &sites)?, sites))
}

/// `ρ ↦ UρU*` for a random `k`-junta unitary, degree `≤ 2k`.
pub fn random_junta_conjugation<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<SuperopSpectrum> {
    let (u, _) = random_junta_unitary(n, k, rng)?;
    SuperopSpectrum::from_unitary(&u)
}

/// Kraus operators of a random channel from a Haar isometry into `env` copies.
pub fn random_kraus<R: Rng + ?Sized>(n: usize, env: usize, rng: &mut R) -> Result<Vec<DenseOperator>> {
    let dim = 1usize << n;
    let big = haar_unitary(dim * env, rng);
    (0..env)
        .map(|k| DenseOperator::new(big.view((k * dim, 0), (dim, dim)).into_owned()))
        .collect()
}

/// `±1`-valued function of `k` random variables with a uniformly random truth
/// table on them, so degree `≤ k`.
pub fn random_boolean_junta<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<BooleanSpectrum<f64>> {
    if k > n || k > 20 {
        return Err(Error::InvalidParams(format!("junta size {k} for n = {n}")));
    }
    let table: Vec<f64> = (0..1usize << k)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let small = BooleanSpectrum::from_truth_table(&table)?;
    let vars = random_sites(n, k, rng);
    small.embed(n, &vars)
}

/// Convex combination of `terms` random degree-`≤ d` Boolean juntas, scaled by
/// a factor in `[0.5, 1]`; bounded by 1 with degree `≤ d`.
pub fn random_bounded_poly<R: Rng + ?Sized>(n: usize, d: usize, terms: usize, rng: &mut R) -> Result<BooleanSpectrum<f64>> {
    let w: Vec<f64> = (0..terms.max(1)).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let scale = rng.random_range(0.5..1.0);
    let mut entries: Vec<(Subset, f64)> = Vec::new();
    for wi in w {
        let g = random_boolean_junta(n, d.min(n), rng)?;
        entries.extend(g.iter().map(|(s, c)| (*s, c * wi / total * scale)));
    }
    BooleanSpectrum::new(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Spectrum;
    use crate::rng::stream;

    #[test]
    fn haar_is_unitary() {
        let mut rng = stream(1, 0);
        let u = DenseOperator::new(haar_unitary(8, &mut rng)).unwrap();
        assert!(u.is_unitary(1e-10));
    }

    #[test]
    fn families_have_declared_degree() {
        let mut rng = stream(2, 0);
        for _ in 0..20 {
            let ch = random_pauli_mixture(3, 1, 5, &mut rng).unwrap();
            assert!(ch.degree() <= 2);
            assert!(ch.is_pauli_channel());
            let cj = random_junta_conjugation(4, 2, &mut rng).unwrap();
            assert!(Spectrum::degree(&cj) <= 4);
            let f = random_boolean_junta(8, 3, &mut rng).unwrap();
            assert!(f.degree() <= 3 && f.is_boolean(1e-12).unwrap());
            let p = random_bounded_poly(6, 2, 3, &mut rng).unwrap();
            assert!(p.degree() <= 2 && p.sup_norm().unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn kraus_is_trace_preserving() {
        let mut rng = stream(3, 0);
        let ks = random_kraus(2, 3, &mut rng).unwrap();
        let mut sum = DMatrix::<C64>::zeros(4, 4);
        for k in &ks {
            sum += k.matrix().adjoint() * k.matrix();
        }
        assert!((sum - DMatrix::identity(4, 4)).norm() < 1e-10);
    }
}
