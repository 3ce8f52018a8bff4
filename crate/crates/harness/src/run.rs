//! Executes configs: one record per repetition, repetitions in parallel.

use std::collections::BTreeMap;

use lowdeg_core::bh::{bh_cb_check, bh_check_boolean, bh_check_channel, bh_check_operator, InequalityReport, MultilinearTensor};
use lowdeg_core::learn::{
    learn_boolean_exact, learn_bounded_poly, learn_channel, learn_pauli_channel, learn_pauli_channel_entangled,
    learn_tensor_ei, learn_unitary, tensor_sample_size, AchievedErrors, BooleanMode, LearnReport, LearnedSpectrum,
};
use lowdeg_core::qqa::{qqa_extract_tensor, qqa_sample_stream};
use lowdeg_core::rng::split_seed;
use lowdeg_core::sim::{ShotOracle, Target};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Task};
use crate::error::{HarnessError, Result};
use crate::instance::{Family, Instance};

/// Bound on `‖T̂‖_{2d/(d+1)}` for query-algorithm amplitudes.
pub const CB_TOL: f64 = 1e-8;

/// What a learner run achieved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnOutcome {
    pub algorithm: String,
    pub epsilon: f64,
    pub delta: f64,
    /// Name of the error measure the success test uses.
    pub metric: String,
    pub error: f64,
    pub success: bool,
    pub total_queries: u128,
    pub queries: BTreeMap<String, u128>,
    pub achieved: AchievedErrors,
    pub report: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub task: Task,
    pub instance_id: String,
    pub repetition: usize,
    /// Seed of this repetition, `split(seed, repetition)`.
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_seed: Option<u64>,
    pub n: usize,
    pub d: usize,
    pub shot_multiplier: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots_override: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learn: Option<LearnOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inequality: Option<InequalityReport>,
    /// Extracted amplitude tensor, exported separately.
    #[serde(skip)]
    pub tensor: Option<MultilinearTensor>,
}

impl ExperimentRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

struct Resolved {
    instance: Instance,
    id: String,
    family: Option<Family>,
    seed: Option<u64>,
}

fn resolve_instance(cfg: &ExperimentConfig, rep_seed: u64, file_cache: Option<&Instance>) -> Result<Resolved> {
    let spec = &cfg.instance;
    if let Some(inst) = file_cache {
        let path = spec.file.as_ref().expect("file source");
        inst.check_degree(spec.d)?;
        return Ok(Resolved {
            instance: inst.clone(),
            id: path.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
            family: None,
            seed: None,
        });
    }
    let mut g = spec.generator().expect("validated: family or file");
    let seed = spec.seed.unwrap_or_else(|| split_seed(rep_seed, 0));
    g.seed = Some(seed);
    let instance = g.generate()?;
    Ok(Resolved {
        id: g.instance_id(),
        instance,
        family: Some(g.family),
        seed: Some(seed),
    })
}

fn wrong_instance(task: Task, inst: &Instance) -> HarnessError {
    HarnessError::config(format!("task {} cannot use a {} instance", task.name(), inst.kind()))
}

fn outcome(mut report: LearnReport, truth: LearnedSpectrum, metric: &str) -> Result<LearnOutcome> {
    let achieved = report.score(&truth)?.clone();
    let eps = report.params.epsilon;
    let (error, success) = match metric {
        "l2" => (achieved.l2, achieved.l2 <= eps),
        "l2sq" => (achieved.l2sq, achieved.l2sq <= eps * eps),
        "tv" => {
            let tv = achieved.tv.unwrap_or(f64::INFINITY);
            (tv, tv <= eps / 2.0)
        }
        "exact" => {
            let exact = achieved.exact.unwrap_or(false);
            (if exact { 0.0 } else { 1.0 }, exact)
        }
        // tensor learner: squared ℓ2 error against ε
        "l2sq-eps" => (achieved.l2sq, achieved.l2sq <= eps),
        _ => unreachable!("metric names are internal"),
    };
    Ok(LearnOutcome {
        algorithm: report.algorithm.clone(),
        epsilon: eps,
        delta: report.params.delta,
        metric: metric.trim_end_matches("-eps").to_string(),
        error,
        success,
        total_queries: report.total_queries(),
        queries: report.queries.clone(),
        achieved,
        report: report.to_value(),
    })
}

fn oracle(cfg: &ExperimentConfig, target: Target, seed: u64) -> Result<ShotOracle> {
    let o = ShotOracle::new(target, seed)?;
    Ok(match cfg.options.budget {
        Some(b) => o.with_budget(b),
        None => o,
    })
}

fn run_learner(cfg: &ExperimentConfig, inst: &Instance, oracle_seed: u64) -> Result<LearnOutcome> {
    let p = &cfg.params;
    let target = || inst.target().ok_or_else(|| wrong_instance(cfg.task, inst));
    match (cfg.task, inst) {
        (Task::LearnChannel, Instance::Channel(s)) => {
            let r = learn_channel(&mut oracle(cfg, target()?, oracle_seed)?, p)?;
            outcome(r, LearnedSpectrum::Superop(s.clone()), "l2")
        }
        (Task::LearnUnitary, Instance::Unitary(u)) => {
            let r = learn_unitary(&mut oracle(cfg, target()?, oracle_seed)?, p)?;
            outcome(r, LearnedSpectrum::Operator(u.clone()), "l2")
        }
        (Task::LearnPauliChannel, Instance::Channel(s)) => {
            if !s.is_pauli_channel() {
                return Err(HarnessError::config("learn-pauli-channel needs a Pauli channel"));
            }
            let mut o = oracle(cfg, target()?, oracle_seed)?;
            let r = if cfg.options.entangled {
                learn_pauli_channel_entangled(&mut o, p)?
            } else {
                learn_pauli_channel(&mut o, p)?
            };
            outcome(r, LearnedSpectrum::Superop(s.clone()), "tv")
        }
        (Task::LearnBoolean, Instance::Boolean(f)) => {
            let mode = cfg.options.mode.unwrap_or(BooleanMode::Classical);
            let r = learn_boolean_exact(&mut oracle(cfg, target()?, oracle_seed)?, p, mode)?;
            outcome(r, LearnedSpectrum::Boolean(f.clone()), "exact")
        }
        (Task::LearnPoly, Instance::Bounded(f) | Instance::Boolean(f)) => {
            let mut o = oracle(cfg, Target::BoundedPoly(f.clone()), oracle_seed)?;
            let r = learn_bounded_poly(&mut o, p)?;
            outcome(r, LearnedSpectrum::Boolean(f.clone()), "l2sq")
        }
        (Task::LearnTensor, Instance::Qqa(alg)) => {
            let truth = qqa_extract_tensor(alg)?.tensor;
            let count = match cfg.options.samples {
                Some(s) => s as u128,
                None => tensor_sample_size(alg.n(), p)?,
            };
            let count = usize::try_from(count)
                .map_err(|_| HarnessError::Budget(format!("{count} samples do not fit in memory")))?;
            if let Some(b) = cfg.options.budget {
                if count as u128 > b {
                    return Err(HarnessError::Budget(format!("{count} samples exceed the budget of {b}")));
                }
            }
            let samples = qqa_sample_stream(alg, count, oracle_seed)?;
            let r = learn_tensor_ei(&samples, alg.d(), alg.n(), p)?;
            outcome(r, LearnedSpectrum::Tensor(truth), "l2sq-eps")
        }
        _ => Err(wrong_instance(cfg.task, inst)),
    }
}

fn run_inequality(task: Task, inst: &Instance, d: usize) -> Result<(InequalityReport, Option<MultilinearTensor>)> {
    match (task, inst) {
        (Task::BhVerify, Instance::Boolean(f)) => {
            let r = bh_check_boolean(f, d)?;
            if !r.holds() {
                return Err(HarnessError::Invariant(format!("Boolean BH fails: {} > {}", r.lhs, r.rhs)));
            }
            Ok((r, None))
        }
        (Task::BhVerify, Instance::Channel(s)) => Ok((bh_check_channel(s, d)?, None)),
        (Task::BhVerify, Instance::Unitary(u)) => Ok((bh_check_operator(u, d)?, None)),
        (Task::BhVerify | Task::Qqa, Instance::Qqa(alg)) => {
            let t = qqa_extract_tensor(alg)?.tensor;
            let r = bh_cb_check(&t)?.with("cb_bound", 1);
            if r.lhs > 1.0 + CB_TOL {
                return Err(HarnessError::Invariant(format!(
                    "amplitude tensor has ‖T̂‖ = {} above the cb bound 1",
                    r.lhs
                )));
            }
            Ok((r, Some(t)))
        }
        _ => Err(wrong_instance(task, inst)),
    }
}

fn load_file_instance(cfg: &ExperimentConfig) -> Result<Option<Instance>> {
    cfg.instance.file.as_ref().map(|p| Instance::read(p)).transpose()
}

/// One repetition.
pub fn run_repetition(cfg: &ExperimentConfig, repetition: usize) -> Result<ExperimentRecord> {
    run_repetition_with(cfg, repetition, load_file_instance(cfg)?.as_ref())
}

fn run_repetition_with(cfg: &ExperimentConfig, repetition: usize, file: Option<&Instance>) -> Result<ExperimentRecord> {
    let rep_seed = split_seed(cfg.seed, repetition as u64);
    let r = resolve_instance(cfg, rep_seed, file)?;
    let mut record = ExperimentRecord {
        task: cfg.task,
        instance_id: r.id,
        repetition,
        seed: rep_seed,
        family: r.family,
        instance_seed: r.seed,
        n: r.instance.n(),
        d: cfg.instance.d,
        shot_multiplier: cfg.params.shot_multiplier,
        shots_override: cfg.params.shots_override,
        learn: None,
        inequality: None,
        tensor: None,
    };
    if cfg.task.is_inequality() {
        let (rep, t) = run_inequality(cfg.task, &r.instance, cfg.instance.d)?;
        record.inequality = Some(rep);
        record.tensor = t;
    } else {
        record.learn = Some(run_learner(cfg, &r.instance, split_seed(rep_seed, 1))?);
    }
    Ok(record)
}

/// Runs every repetition on `threads` workers (0 = rayon default). Records
/// come back in repetition order regardless of scheduling.
pub fn run(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let file = load_file_instance(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Other(e.to_string()))?;
    let results: Vec<Result<ExperimentRecord>> = pool.install(|| {
        (0..cfg.repetitions)
            .into_par_iter()
            .map(|i| run_repetition_with(cfg, i, file.as_ref()))
            .collect()
    });
    results.into_iter().collect()
}

/// The configs a sweep expands to, in axis order.
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<ExperimentConfig> {
    let s = &cfg.sweep;
    let mults: Vec<Option<f64>> = if s.shot_multipliers.is_empty() {
        vec![None]
    } else {
        s.shot_multipliers.iter().copied().map(Some).collect()
    };
    let shots: Vec<Option<u128>> = if s.shots.is_empty() {
        vec![None]
    } else {
        s.shots.iter().copied().map(Some).collect()
    };
    let ds: Vec<Option<usize>> = if s.d.is_empty() { vec![None] } else { s.d.iter().copied().map(Some).collect() };
    let ns: Vec<Option<usize>> = if s.n.is_empty() { vec![None] } else { s.n.iter().copied().map(Some).collect() };
    let mut out = Vec::new();
    for &d in &ds {
        for &n in &ns {
            for &m in &mults {
                for &t in &shots {
                    let mut c = cfg.clone();
                    if let Some(d) = d {
                        c.instance.d = d;
                        c.params.d = d;
                    }
                    if let Some(n) = n {
                        c.instance.n = Some(n);
                    }
                    if let Some(m) = m {
                        c.params.shot_multiplier = m;
                    }
                    if let Some(t) = t {
                        c.params.shots_override = Some(t);
                    }
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Runs every sweep point; records are concatenated in point order.
pub fn sweep(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<ExperimentRecord>> {
    let mut all = Vec::new();
    for point in sweep_points(cfg) {
        all.extend(run(&point, threads)?);
    }
    Ok(all)
}

/// The inequality `bh-verify` would check on `inst`; bounded functions have none.
pub fn inequality_for(inst: &Instance, d: usize) -> Result<Option<InequalityReport>> {
    match inst {
        Instance::Bounded(_) => Ok(None),
        _ => Ok(Some(run_inequality(Task::BhVerify, inst, d)?.0)),
    }
}
