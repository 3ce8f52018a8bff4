//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line
//! (run with `--nocapture` to see them) and fails on FAIL.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use lowdeg::config::{ExperimentConfig, InstanceSpec, Task};
use lowdeg::instance::Family;
use lowdeg::report::median;
use lowdeg::run::ExperimentRecord;
use lowdeg::{run, sweep};
use lowdeg_core::bh::{bh_cb_check, f_phi_build, f_phi_direct, f_phi_truth_table, varopoulos_contractions, Field, MultilinearTensor};
use lowdeg_core::learn::{pauli_estimator_term, BooleanMode, LearnParams};
use lowdeg_core::pauli::{spectrum_of_superop, ChannelInput, DenseOperator, PauliString, Subset, SuperopSpectrum};
use lowdeg_core::qqa::{qqa_extract_tensor, QueryAlgorithm};
use lowdeg_core::random::{haar_unitary, random_bounded_poly, random_boolean_junta, random_kraus};
use lowdeg_core::rng::stream;
use lowdeg_core::sim::circuit::tv_distance;
use lowdeg_core::sim::{circuit_cross_check, sector_key, subset_of_sector, CrossCheckCase, Part, SwapTarget};
use lowdeg_core::C64;

fn verdict(n: usize, pass: bool, detail: String, start: Instant, limit: Duration) {
    let took = start.elapsed();
    let ok = pass && took < limit;
    println!(
        "criterion {n}: {} {detail} [{:.1}s of {}s]",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {n}: {detail} in {took:?}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn spec(family: Family, n: Option<usize>, d: usize) -> InstanceSpec {
    InstanceSpec {
        family: Some(family),
        file: None,
        n,
        d,
        sparsity: None,
        junta: None,
        terms: None,
        m: None,
        seed: None,
    }
}

fn config(task: Task, seed: u64, instance: InstanceSpec, params: LearnParams, reps: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(task, seed, instance, params);
    cfg.repetitions = reps;
    cfg
}

fn successes(recs: &[ExperimentRecord]) -> usize {
    recs.iter().filter(|r| r.learn.as_ref().unwrap().success).count()
}

fn queries(recs: &[ExperimentRecord]) -> Vec<u128> {
    recs.iter().map(|r| r.learn.as_ref().unwrap().total_queries).collect()
}

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

/// All Pauli strings on `n` sites whose digits lie in `alphabet`.
fn strings(n: usize, alphabet: &[u8]) -> Vec<PauliString> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| alphabet.iter().map(move |a| format!("{p}{a}")))
            .collect();
    }
    out.iter().map(|s| ps(s)).collect()
}

fn p_norm(t: &MultilinearTensor) -> f64 {
    let p = 2.0 * t.d() as f64 / (t.d() as f64 + 1.0);
    t.entries().iter().map(|c| c.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

#[test]
fn criterion_01_address_functions_saturate_boolean_bh() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for d in 2..=4usize {
        let cfg = config(Task::BhVerify, d as u64, spec(Family::Address, None, d), LearnParams::default(), 1);
        let rec = &run(&cfg, 0).unwrap()[0];
        let q = rec.inequality.as_ref().unwrap();
        let rhs = 2f64.powf((d as f64 - 1.0) / d as f64);
        // the address function has 4^{d-1} coefficients of modulus 2^{1-d}
        let p = 2.0 * d as f64 / (d as f64 + 1.0);
        let lhs = (4f64.powi(d as i32 - 1) * 2f64.powf((1.0 - d as f64) * p)).powf(1.0 / p);
        let dev = (q.ratio - 1.0).abs().max((q.lhs - lhs).abs()).max((q.rhs - rhs).abs());
        worst = worst.max(dev);
        lines.push(format!("d={d} ratio={:.15}", q.ratio));
    }
    verdict(1, worst <= 1e-9, format!("{} (max deviation {worst:.2e})", lines.join(", ")), start, secs(10));
}

#[test]
fn criterion_02_query_tensors_obey_cb_bound() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for k in 0..50u64 {
        let mut rng = stream(k, 9000);
        let (n, m, d) = (1 + (k % 3) as usize, 1 + (k / 3 % 2) as usize, 1 + (k / 6 % 2) as usize);
        let alg = QueryAlgorithm::random(n, m, d, &mut rng).unwrap();
        let t = qqa_extract_tensor(&alg).unwrap().tensor;
        let r = bh_cb_check(&t).unwrap();
        assert!((r.lhs - p_norm(&t)).abs() < 1e-12);
        worst = worst.max(r.lhs);
    }
    // T = x_1(1): one query, identity unitaries, start and accept e_0
    let n = 3;
    let id = DMatrix::<C64>::identity(n, n);
    let e0 = DVector::from_fn(n, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
    let witness = QueryAlgorithm::new(n, 1, vec![id.clone(), id], e0.clone(), e0).unwrap();
    for x in 0..1u64 << n {
        let expect = if x & 1 == 1 { -1.0 } else { 1.0 };
        assert!((witness.evaluate(&[x]).unwrap() - C64::new(expect, 0.0)).norm() < 1e-15);
    }
    let wt = qqa_extract_tensor(&witness).unwrap().tensor;
    let wr = bh_cb_check(&wt).unwrap();
    let hit = (wr.lhs - 1.0).abs() <= 1e-12 && (wr.ratio - 1.0).abs() <= 1e-12;
    verdict(
        2,
        worst <= 1.0 + 1e-8 && hit,
        format!("max ‖T̂‖ over 50 algorithms = {worst:.12}, witness norm {:.15}", wr.lhs),
        start,
        secs(120),
    );
}

#[test]
fn criterion_03_varopoulos_contractions() {
    let start = Instant::now();
    let mut max_norm: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for k in 0..100u64 {
        let mut rng = stream(k, 9001);
        let d = 2 + (k % 2) as usize;
        let n = 1 + (k / 2 % 3) as usize;
        let field = if k % 4 < 2 { Field::Real } else { Field::Complex };
        let t = MultilinearTensor::random_gaussian(d, n, field, &mut rng).unwrap();
        for s in 1..=d {
            let w = varopoulos_contractions(&t, s).unwrap();
            // one contraction per index, shared by every slot
            assert_eq!(w.matrices.len(), n);
            for x in &w.matrices {
                let op = x.clone().singular_values().max();
                max_norm = max_norm.max(op);
            }
            let dim = w.matrices[0].nrows();
            let mut total = DMatrix::<C64>::zeros(dim, dim);
            for (i, c) in t.entries().iter().enumerate() {
                let prod = t.unflat(i).iter().fold(DMatrix::<C64>::identity(dim, dim), |acc, &j| acc * &w.matrices[j]);
                total += prod * *c;
            }
            let evaluated = total.singular_values().max();
            assert!((evaluated - w.evaluated).abs() < 1e-9);
            let mut groups = vec![0.0; n];
            for (i, c) in t.entries().iter().enumerate() {
                groups[t.unflat(i)[s - 1]] += c.norm_sqr();
            }
            let bound: f64 = groups.iter().map(|g| g.sqrt()).sum();
            assert!((bound - w.bound).abs() < 1e-9 * bound.max(1.0));
            min_gap = min_gap.min(evaluated - bound);
        }
    }
    verdict(
        3,
        max_norm <= 1.0 + 1e-9 && min_gap >= -1e-9,
        format!("max contraction norm {max_norm:.12}, min(evaluated − bound) {min_gap:.3e}"),
        start,
        secs(300),
    );
}

#[test]
fn criterion_04_f_phi_reduction() {
    let start = Instant::now();
    let mut max_diff: f64 = 0.0;
    let mut max_val: f64 = 0.0;
    for k in 0..20u64 {
        let mut rng = stream(k, 9002);
        let n = 1 + (k % 2) as usize;
        let kraus = random_kraus(n, 1 + (k / 2 % 3) as usize, &mut rng).unwrap();
        let phi = spectrum_of_superop(&ChannelInput::Kraus(kraus), true).unwrap();
        let closed = f_phi_build(&phi).unwrap();
        let direct = f_phi_direct(&phi).unwrap();
        for (s, c) in direct.iter() {
            max_diff = max_diff.max((closed.get(*s) - c).norm());
        }
        for (s, c) in closed.iter() {
            max_diff = max_diff.max((direct.get(*s) - c).norm());
        }
        max_val = f_phi_truth_table(&phi).unwrap().iter().map(|c| c.norm()).fold(max_val, f64::max);
    }
    verdict(
        4,
        max_diff <= 1e-10 && max_val <= 1.0 + 1e-6,
        format!("max |closed − direct| {max_diff:.3e}, max |f_Φ| {max_val:.12}"),
        start,
        secs(120),
    );
}

#[test]
fn criterion_05_channel_learner() {
    let start = Instant::now();
    let cfg = config(
        Task::LearnChannel,
        5,
        spec(Family::PauliMixtureChannel, Some(3), 2),
        LearnParams::new(2, 0.15, 0.1),
        100,
    );
    let recs = run(&cfg, 0).unwrap();
    let ok = successes(&recs);
    let errors: Vec<f64> = recs.iter().map(|r| r.learn.as_ref().unwrap().error).collect();
    verdict(
        5,
        ok >= 85,
        format!("ℓ2 ≤ 0.15 in {ok}/100 runs, median error {:.3e}", median(&errors)),
        start,
        secs(600),
    );
}

#[test]
fn criterion_06_unitary_learner() {
    let start = Instant::now();
    let mut inst = spec(Family::JuntaUnitary, Some(4), 2);
    inst.junta = Some(2);
    let cfg = config(Task::LearnUnitary, 6, inst, LearnParams::new(2, 0.15, 0.1), 100);
    let recs = run(&cfg, 0).unwrap();
    let ok = successes(&recs);
    let errors: Vec<f64> = recs.iter().map(|r| r.learn.as_ref().unwrap().error).collect();
    verdict(
        6,
        ok >= 85,
        format!("ℓ2 ≤ 0.15 in {ok}/100 runs, median error {:.3e}", median(&errors)),
        start,
        secs(600),
    );
}

#[test]
fn criterion_07_pauli_estimator_is_exact_in_expectation() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for n in 1..=2usize {
        let all = strings(n, &[0, 1, 2, 3]);
        let bases = strings(n, &[1, 2, 3]);
        for k in 0..5u64 {
            let mut rng = stream(k + 10 * n as u64, 9003);
            // rates on weight ≤ 2, which is every string at n ≤ 2
            let w: Vec<f64> = all.iter().map(|_| rng.random::<f64>()).collect();
            let total: f64 = w.iter().sum();
            let rates: Vec<(PauliString, f64)> = all.iter().cloned().zip(w.iter().map(|v| v / total)).collect();
            SuperopSpectrum::from_pauli_rates(n, rates.clone()).unwrap();
            for x in &all {
                let mut expect = 0.0;
                for s in &bases {
                    // outcome r flags the sites where the error anticommutes with the basis
                    for (e, p) in &rates {
                        let r = (0..n)
                            .filter(|&j| e.word()[j] != 0 && e.word()[j] != s.word()[j])
                            .fold(0u64, |acc, j| acc | 1 << j);
                        expect += p * pauli_estimator_term(s, r, x);
                    }
                }
                expect /= bases.len() as f64;
                let truth = rates.iter().find(|(e, _)| e == x).unwrap().1;
                worst = worst.max((expect - truth).abs());
                checked += 1;
            }
        }
    }
    verdict(
        7,
        worst <= 1e-12,
        format!("{checked} rates, max |E[Φ̃(x)] − Φ̂(x)| {worst:.2e}"),
        start,
        secs(10),
    );
}

#[test]
fn criterion_08_pauli_channel_learner() {
    let start = Instant::now();
    // rates on weight ≤ 2 make a superoperator of degree ≤ 4
    let inst = spec(Family::PauliMixtureChannel, Some(3), 4);
    let params = LearnParams::new(2, 0.2, 0.1);
    let probes = (9f64.powi(2) * 3f64.powi(4) / 0.04 * (3.0f64 / 0.1).ln()).ceil() as u128;
    let plain = run(&config(Task::LearnPauliChannel, 8, inst.clone(), params.clone(), 100), 0).unwrap();
    let mut cfg = config(Task::LearnPauliChannel, 8, inst, params, 100);
    cfg.options.entangled = true;
    let ent = run(&cfg, 0).unwrap();
    let (ok_plain, ok_ent) = (successes(&plain), successes(&ent));
    let q_plain = queries(&plain);
    let q_ent = queries(&ent);
    let probes_match = q_plain.iter().all(|&q| q == probes);
    let fewer = q_ent.iter().max() < q_plain.iter().min();
    verdict(
        8,
        ok_plain >= 90 && ok_ent >= 90 && probes_match && fewer,
        format!(
            "TV ≤ 0.1 in {ok_plain}/100 with {} probes (expected {probes}); entangled {ok_ent}/100 with {} queries",
            q_plain[0],
            q_ent.iter().max().unwrap()
        ),
        start,
        secs(900),
    );
}

#[test]
fn criterion_09_boolean_exact_learning() {
    let start = Instant::now();
    let params = LearnParams::new(3, 0.5, 0.1);
    let mut detail = Vec::new();
    let mut pass = true;
    for mode in [BooleanMode::Classical, BooleanMode::Quantum] {
        let mut ok = 0;
        let mut total = 0;
        for (i, n) in [8usize, 16].into_iter().enumerate() {
            let mut junta = spec(Family::BooleanJunta, Some(n), 3);
            junta.junta = Some(3);
            for (j, inst) in [junta, spec(Family::Address, Some(n), 3)].into_iter().enumerate() {
                let mut cfg = config(Task::LearnBoolean, 90 + 2 * i as u64 + j as u64, inst, params.clone(), 50);
                cfg.options.mode = Some(mode);
                let recs = run(&cfg, 0).unwrap();
                ok += successes(&recs);
                total += recs.len();
            }
        }
        pass &= ok as f64 >= (1.0 - params.delta) * total as f64;
        detail.push(format!("{mode:?} exact in {ok}/{total}"));
    }
    let mut medians = Vec::new();
    for n in [8usize, 16, 32] {
        let mut cfg = config(Task::LearnBoolean, 99, spec(Family::Address, Some(n), 3), params.clone(), 30);
        cfg.options.mode = Some(BooleanMode::Quantum);
        let q: Vec<f64> = queries(&run(&cfg, 0).unwrap()).into_iter().map(|q| q as f64).collect();
        medians.push(median(&q));
    }
    let flat = medians.windows(2).all(|w| w[0] == w[1]);
    pass &= flat;
    detail.push(format!("quantum median queries at n=8,16,32: {medians:?}"));
    verdict(9, pass, detail.join("; "), start, secs(300));
}

#[test]
fn criterion_10_bounded_poly_learner() {
    let start = Instant::now();
    let cfg = config(
        Task::LearnPoly,
        10,
        spec(Family::BoundedPoly, Some(6), 2),
        LearnParams::new(2, 0.2, 0.1),
        50,
    );
    let recs = run(&cfg, 0).unwrap();
    let ok = successes(&recs);
    let mut in_sector = true;
    for r in &recs {
        let inst = cfg.instance.generator().map(|mut g| {
            g.seed = r.instance_seed;
            g.generate().unwrap()
        });
        let Some(lowdeg::Instance::Bounded(f) | lowdeg::Instance::Boolean(f)) = inst else {
            panic!("bounded-poly instance")
        };
        let heavy = r.learn.as_ref().unwrap().report["heavy_set"].as_array().unwrap().clone();
        for key in heavy {
            let digits = key.as_str().unwrap();
            let s = Subset::from_elements(digits.char_indices().filter(|(_, c)| *c == '1').map(|(i, _)| i));
            let pauli = sector_key(6, 3, s);
            in_sector &= pauli.word()[0] == 3 && pauli.word()[1..].iter().all(|&b| b == 0 || b == 3);
            in_sector &= subset_of_sector(&pauli) == Some(s) && f.get(s) != 0.0;
        }
    }
    verdict(
        10,
        ok >= 45 && in_sector,
        format!("ℓ2² ≤ 0.04 in {ok}/50 runs, heavy keys in sector and support: {in_sector}"),
        start,
        secs(600),
    );
}

#[test]
fn criterion_11_tensor_learner_log_n() {
    let start = Instant::now();
    let eps = 0.1;
    let params = LearnParams::new(2, eps, 0.1);
    // B(ε, d) = ε^{-(d+1)}
    let budget = eps.powi(-3).ceil();
    let mut fractions = Vec::new();
    for n in [2usize, 3, 4] {
        let mut inst = spec(Family::RandomQqa, Some(n), 2);
        inst.m = Some(2);
        let mut cfg = config(Task::LearnTensor, 11, inst, params.clone(), 50);
        cfg.options.samples = Some((budget * (n as f64).log2()).ceil() as u64);
        let recs = run(&cfg, 0).unwrap();
        fractions.push(successes(&recs) as f64 / recs.len() as f64);
    }
    let pass = fractions.iter().all(|&f| f >= 0.8) && fractions.windows(2).all(|w| w[1] >= w[0] - 0.05);
    verdict(
        11,
        pass,
        format!("ℓ2² ≤ 0.1 fraction at n=2,3,4: {fractions:?} with B = {budget}"),
        start,
        secs(600),
    );
}

fn haar_op(n: usize, rng: &mut impl Rng) -> DenseOperator {
    DenseOperator::new(haar_unitary(1 << n, rng)).unwrap()
}

fn random_string(n: usize, alphabet: &[u8], rng: &mut impl Rng) -> PauliString {
    PauliString::new((0..n).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()).unwrap()
}

fn battery() -> Vec<CrossCheckCase> {
    let mut rng = stream(12, 9012);
    let mut cases = Vec::new();
    for k in 0..6 {
        let n = 1 + k % 2;
        cases.push(CrossCheckCase::HadamardTest {
            u: haar_op(n, &mut rng),
            x: random_string(n, &[0, 1, 2, 3], &mut rng),
            part: if k < 3 { Part::Re } else { Part::Im },
        });
    }
    for k in 0..5 {
        cases.push(CrossCheckCase::BellSampling {
            u: haar_op(1 + k % 2, &mut rng),
        });
    }
    let targets = [
        SwapTarget::Basis(ps("2")),
        SwapTarget::Mixture(ps("0"), ps("3")),
        SwapTarget::RealSuperposition(ps("1"), ps("2")),
        SwapTarget::ImagSuperposition(ps("0"), ps("1")),
        SwapTarget::Basis(ps("13")),
    ];
    for target in targets {
        let n = target_n(&target);
        cases.push(CrossCheckCase::SwapTest {
            kraus: random_kraus(n, 2, &mut rng).unwrap(),
            target,
        });
    }
    for k in 0..4 {
        cases.push(CrossCheckCase::ChoiDiag {
            kraus: random_kraus(1 + k % 2, 1 + k, &mut rng).unwrap(),
        });
    }
    for k in 0..4 {
        let n = 1 + k % 2;
        let all = strings(n, &[0, 1, 2, 3]);
        let w: Vec<f64> = all.iter().map(|_| rng.random::<f64>()).collect();
        let total: f64 = w.iter().sum();
        cases.push(CrossCheckCase::PauliProbe {
            rates: all.into_iter().zip(w.iter().map(|v| v / total)).collect(),
            s: random_string(n, &[1, 2, 3], &mut rng),
        });
    }
    for k in 0..3 {
        cases.push(CrossCheckCase::FourierSample {
            f: random_boolean_junta(2, 1 + k % 2, &mut rng).unwrap(),
        });
    }
    for _ in 0..3 {
        cases.push(CrossCheckCase::BlockEncoding {
            p: random_bounded_poly(1, 1, 2, &mut rng).unwrap(),
        });
    }
    cases
}

fn target_n(t: &SwapTarget) -> usize {
    match t {
        SwapTarget::Basis(x)
        | SwapTarget::Mixture(x, _)
        | SwapTarget::RealSuperposition(x, _)
        | SwapTarget::ImagSuperposition(x, _) => x.n(),
    }
}

#[test]
fn criterion_12_primitive_cross_check() {
    let start = Instant::now();
    let cases = battery();
    let mut worst: f64 = 0.0;
    let mut by_kind: BTreeMap<&str, usize> = BTreeMap::new();
    for case in &cases {
        let (analytic, circuit) = circuit_cross_check(case).unwrap();
        let total: f64 = analytic.values().sum();
        assert!((total - 1.0).abs() < 1e-9);
        worst = worst.max(tv_distance(&analytic, &circuit));
        let kind = match case {
            CrossCheckCase::HadamardTest { .. } => "hadamard",
            CrossCheckCase::BellSampling { .. } => "bell",
            CrossCheckCase::SwapTest { .. } => "swap",
            CrossCheckCase::ChoiDiag { .. } => "choi",
            CrossCheckCase::PauliProbe { .. } => "probe",
            CrossCheckCase::FourierSample { .. } => "fourier",
            CrossCheckCase::BlockEncoding { .. } => "block",
        };
        *by_kind.entry(kind).or_default() += 1;
    }
    verdict(
        12,
        cases.len() == 30 && worst <= 1e-9,
        format!("{} cases {by_kind:?}, max TV {worst:.2e}", cases.len()),
        start,
        secs(60),
    );
}

#[test]
fn criterion_13_error_shrinks_with_shots() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    let fixed = |mut s: InstanceSpec, seed: u64| {
        s.seed = Some(seed);
        s
    };
    let mut unitary = spec(Family::JuntaUnitary, Some(3), 2);
    unitary.junta = Some(2);
    let mut tensor = spec(Family::RandomQqa, Some(3), 2);
    tensor.m = Some(2);
    let mut cases: Vec<(&str, ExperimentConfig)> = vec![
        (
            "channel",
            config(Task::LearnChannel, 13, fixed(spec(Family::PauliMixtureChannel, Some(2), 2), 1), LearnParams::new(2, 0.2, 0.1), 50),
        ),
        ("unitary", config(Task::LearnUnitary, 13, fixed(unitary, 2), LearnParams::new(2, 0.2, 0.1), 50)),
        (
            "pauli",
            config(Task::LearnPauliChannel, 13, fixed(spec(Family::PauliMixtureChannel, Some(2), 4), 3), LearnParams::new(2, 0.2, 0.1), 50),
        ),
        (
            "poly",
            config(Task::LearnPoly, 13, fixed(spec(Family::BoundedPoly, Some(4), 2), 5), LearnParams::new(2, 0.2, 0.1), 50),
        ),
        ("tensor", config(Task::LearnTensor, 13, fixed(tensor, 6), LearnParams::new(2, 0.1, 0.1), 50)),
    ];
    let mut ent = cases[2].1.clone();
    ent.options.entangled = true;
    cases.push(("pauli-entangled", ent));
    for (name, mode) in [("boolean-classical", BooleanMode::Classical), ("boolean-quantum", BooleanMode::Quantum)] {
        let mut cfg = config(
            Task::LearnBoolean,
            13,
            fixed(spec(Family::Address, Some(8), 3), 4),
            LearnParams::new(3, 0.5, 0.1),
            50,
        );
        cfg.options.mode = Some(mode);
        cases.push((name, cfg));
    }
    for (name, mut cfg) in cases {
        cfg.sweep.shot_multipliers = vec![0.25, 1.0, 4.0];
        cfg.validate().unwrap();
        let recs = sweep(&cfg, 0).unwrap();
        let mut meds = Vec::new();
        for m in [0.25, 1.0, 4.0] {
            let e: Vec<f64> = recs
                .iter()
                .filter(|r| r.shot_multiplier == m)
                .map(|r| r.learn.as_ref().unwrap().error)
                .collect();
            assert_eq!(e.len(), 50);
            meds.push(median(&e));
        }
        let mono = meds.windows(2).all(|w| w[1] <= w[0]);
        pass &= mono;
        lines.push(format!("{name} [{}]", meds.iter().map(|m| format!("{m:.3e}")).collect::<Vec<_>>().join(", ")));
    }
    verdict(13, pass, format!("medians at ×0.25, ×1, ×4: {}", lines.join(", ")), start, secs(1200));
}
