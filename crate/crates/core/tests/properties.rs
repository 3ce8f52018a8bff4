use lowdeg_core::bh::{
    blei_mixed_norm, s1_to_sinfty_ub, sup_norm_bruteforce, varopoulos_contractions, Field, MultilinearTensor,
};
use lowdeg_core::pauli::{
    spectrum_of_operator, BooleanSpectrum, DenseOperator, OperatorSpectrum, PauliString, Subset,
};
use lowdeg_core::qqa::{qqa_extract_tensor, QueryAlgorithm};
use lowdeg_core::random::{random_boolean_junta, random_junta_conjugation, random_junta_unitary, random_pauli_mixture};
use lowdeg_core::C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sparse_operator(n: usize, terms: &[(u64, f64, f64)]) -> OperatorSpectrum {
    let total = 4u64.pow(n as u32);
    OperatorSpectrum::new(
        n,
        terms
            .iter()
            .map(|&(k, re, im)| (PauliString::from_index(n, k % total), C64::new(re, im))),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operator_parseval(n in 1usize..=3, terms in prop::collection::vec((any::<u64>(), -1.0..1.0f64, -1.0..1.0f64), 1..6)) {
        let m = sparse_operator(n, &terms);
        let dense = m.to_dense().unwrap();
        prop_assert!((dense.hs_norm_sq() - m.norm_sq()).abs() <= 1e-9);
    }

    #[test]
    fn operator_round_trip(n in 1usize..=3, terms in prop::collection::vec((any::<u64>(), -1.0..1.0f64, -1.0..1.0f64), 1..6)) {
        let m = sparse_operator(n, &terms);
        let back = spectrum_of_operator(&m.to_dense().unwrap());
        prop_assert_eq!(back.len(), m.len());
        for (x, c) in m.iter() {
            prop_assert!((back.get(x) - c).norm() <= 1e-10);
        }
    }

    #[test]
    fn channel_spectra_are_psd_with_unit_trace(seed in any::<u64>(), n in 1usize..=3, k in 1usize..=2) {
        let mut r = rng(seed);
        let k = k.min(n);
        for phi in [random_junta_conjugation(n, k, &mut r).unwrap(), random_pauli_mixture(n, 1, 4, &mut r).unwrap()] {
            let (_, mat) = phi.support_matrix();
            let min = mat.clone().symmetric_eigenvalues().min();
            prop_assert!(min >= -1e-9, "{min}");
            prop_assert!((phi.trace() - C64::new(1.0, 0.0)).norm() <= 1e-9);
            // off-diagonal domination
            for ((x, y), c) in phi.iter() {
                let bound = (phi.get(x, x).re * phi.get(y, y).re).max(0.0).sqrt();
                prop_assert!(c.norm() <= bound + 1e-9);
            }
        }
    }

    #[test]
    fn junta_degrees(seed in any::<u64>(), n in 2usize..=4, k in 1usize..=2) {
        let mut r = rng(seed);
        let (u, _) = random_junta_unitary(n, k, &mut r).unwrap();
        prop_assert!(u.degree() <= k);
        prop_assert!((u.norm_sq() - 1.0).abs() <= 1e-9);
        let phi = random_junta_conjugation(n, k, &mut r).unwrap();
        prop_assert!(phi.degree() <= 2 * k);
    }

    #[test]
    fn haar_unitary_spectrum_is_a_distribution(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let mat = lowdeg_core::random::haar_unitary(1 << n, &mut r);
        let u = spectrum_of_operator(&DenseOperator::new(mat).unwrap());
        prop_assert!((u.norm_sq() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn boolean_granularity(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let f = random_boolean_junta(8, d, &mut r).unwrap();
        prop_assert!(f.degree() <= d);
        let step = 2f64.powi(1 - d as i32);
        for (_, c) in f.iter() {
            let q = c / step;
            prop_assert!((q - q.round()).abs() * step <= 1e-9);
        }
    }

    #[test]
    fn boolean_truth_table_round_trip(table in prop::collection::vec(-1.0..1.0f64, 16)) {
        let f = BooleanSpectrum::from_truth_table(&table).unwrap();
        let back = f.to_truth_table().unwrap();
        for (a, b) in table.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let mean_sq = table.iter().map(|v| v * v).sum::<f64>() / 16.0;
        prop_assert!((f.parseval() - mean_sq).abs() <= 1e-12);
    }

    #[test]
    fn blei_chain_and_contractions(seed in any::<u64>(), d in 2usize..=3, n in 1usize..=3, complex in any::<bool>()) {
        let field = if complex { Field::Complex } else { Field::Real };
        let t = MultilinearTensor::random_gaussian(d, n, field, &mut rng(seed)).unwrap();
        let blei = blei_mixed_norm(&t).unwrap();
        prop_assert!(t.bh_norm() <= blei + 1e-9);
        for s in 1..=d {
            let w = varopoulos_contractions(&t, s).unwrap();
            let slot: f64 = t.slot_norms(s).unwrap().iter().sum();
            prop_assert!((w.bound - slot).abs() <= 1e-9 * slot.max(1.0));
            for m in &w.matrices {
                prop_assert!(m.clone().singular_values().max() <= 1.0 + 1e-9);
            }
            prop_assert!(w.evaluated >= w.bound - 1e-9);
        }
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), d in 1usize..=3, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let t = MultilinearTensor::random_gaussian(d, 2, Field::Complex, &mut rng(seed)).unwrap();
        let lam = C64::new(re, im);
        let s = t.scale(lam);
        let a = lam.norm();
        let close = |x: f64, y: f64| (x - a * y).abs() <= 1e-12 * (1.0 + a * y);
        prop_assert!(close(s.bh_norm(), t.bh_norm()));
        prop_assert!(close(s.pnorm(1.0), t.pnorm(1.0)));
        prop_assert!(close(s.pnorm(2.0), t.pnorm(2.0)));
        prop_assert!(close(sup_norm_bruteforce(&s).unwrap(), sup_norm_bruteforce(&t).unwrap()));
        if d >= 2 {
            prop_assert!(close(blei_mixed_norm(&s).unwrap(), blei_mixed_norm(&t).unwrap()));
        }
    }

    #[test]
    fn query_amplitudes_are_bounded(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=2, d in 1usize..=2) {
        let alg = QueryAlgorithm::random(n, m, d, &mut rng(seed)).unwrap();
        let amp = qqa_extract_tensor(&alg).unwrap();
        prop_assert!(amp.tensor.bh_norm() <= 1.0 + 1e-8);
        let points = 1u64 << n;
        let mut x = vec![0u64; d];
        loop {
            let v = alg.evaluate(&x).unwrap();
            prop_assert!(v.norm() <= 1.0 + 1e-10);
            prop_assert!((v - amp.tensor.eval(&x).unwrap()).norm() <= 1e-9);
            let mut t = 0;
            while t < d {
                x[t] += 1;
                if x[t] < points { break; }
                x[t] = 0;
                t += 1;
            }
            if t == d { break; }
        }
    }

    #[test]
    fn query_multilinearity(seed in any::<u64>(), n in 1usize..=3) {
        // feeding the indicator e_i in block 1 returns the slice T̂_{i,·}
        let alg = QueryAlgorithm::random(n, 2, 2, &mut rng(seed)).unwrap();
        let t = qqa_extract_tensor(&alg).unwrap().tensor;
        for i in 0..n {
            for j in 0..n {
                let e = |k: usize| (0..n).map(|l| if l == k { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
                let v = alg.evaluate_real(&[e(i), e(j)]).unwrap();
                prop_assert!((v - t.get(&[i, j]).unwrap()).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn channel_sup_below_s1_bound(seed in any::<u64>()) {
        let phi = random_pauli_mixture(1, 1, 3, &mut rng(seed)).unwrap();
        let f = lowdeg_core::bh::f_phi_build(&phi).unwrap();
        let sup = sup_norm_bruteforce(&f).unwrap();
        prop_assert!(sup <= s1_to_sinfty_ub(&phi).unwrap() + 1e-6);
        prop_assert!(sup <= 1.0 + 1e-6);
    }
}

#[test]
fn granularity_on_a_thousand_juntas() {
    let mut r = rng(99);
    for i in 0..1000 {
        let d = 1 + i % 4;
        let f = random_boolean_junta(6, d, &mut r).unwrap();
        assert!(f.is_granular(d, 1e-9), "{i}");
    }
}

#[test]
fn majority_is_not_degree_two() {
    let maj = BooleanSpectrum::new(
        3,
        [(Subset(1), 0.5), (Subset(2), 0.5), (Subset(4), 0.5), (Subset(7), -0.5)],
    )
    .unwrap();
    assert_eq!(maj.degree(), 3);
    assert!(maj.is_boolean(1e-12).unwrap());
}
