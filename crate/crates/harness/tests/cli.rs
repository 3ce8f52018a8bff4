use std::fs;
use std::path::Path;
use std::process::Command;

use lowdeg::cli::main_with;
use lowdeg::config::{ExperimentConfig, InstanceSpec, Task};
use lowdeg::error::exit;
use lowdeg::instance::{read_provenance, Family, Instance};
use lowdeg::report::{median, read_records, summarize};
use lowdeg_core::learn::LearnParams;
use lowdeg_core::pauli::io::SpectrumIo;
use lowdeg_core::pauli::{PauliString, SuperopSpectrum};

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

fn file_spec(path: &Path, d: usize) -> InstanceSpec {
    InstanceSpec {
        family: None,
        file: Some(path.to_path_buf()),
        n: None,
        d,
        sparsity: None,
        junta: None,
        terms: None,
        m: None,
        seed: None,
    }
}

fn gen_spec(family: Family, n: Option<usize>, d: usize) -> InstanceSpec {
    InstanceSpec {
        family: Some(family),
        file: None,
        n,
        ..file_spec(Path::new(""), d)
    }
}

fn write_config(dir: &Path, cfg: &ExperimentConfig) -> String {
    let p = dir.join("config.toml");
    fs::write(&p, cfg.to_toml()).unwrap();
    p.to_string_lossy().into_owned()
}

fn lowdeg(args: &[&str]) -> i32 {
    main_with(std::iter::once("lowdeg").chain(args.iter().copied()))
}

#[test]
fn identity_channel_run_meets_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("identity.json");
    SuperopSpectrum::identity_channel(2).write_json(&inst).unwrap();
    let cfg = ExperimentConfig::new(Task::LearnChannel, 3, file_spec(&inst, 2), LearnParams::new(2, 0.1, 0.1));
    let cfg_path = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    assert_eq!(lowdeg(&["run", "--config", &cfg_path, "--out", out.to_str().unwrap()]), exit::OK);
    let recs = read_records(&[out.join("records.jsonl")]).unwrap();
    assert_eq!(recs.len(), 1);
    let l = recs[0].learn.as_ref().unwrap();
    assert!(l.error <= 0.1 && l.success, "{}", l.error);
    for f in ["results.csv", "summary.csv", "metadata.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn bh_verify_address_ratio_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new(
        Task::BhVerify,
        1,
        gen_spec(Family::Address, None, 3),
        LearnParams::default(),
    );
    let cfg_path = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    assert_eq!(lowdeg(&["run", "--config", &cfg_path, "--out", out.to_str().unwrap()]), exit::OK);
    let mut rdr = csv::Reader::from_path(out.join("results.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["instance_id", "d", "n", "lhs", "rhs", "ratio", "field", "seed"]
    );
    let row = rdr.records().next().unwrap().unwrap();
    let ratio: f64 = row[5].parse().unwrap();
    assert!((ratio - 1.0).abs() <= 1e-9, "{ratio}");
    let text = fs::read_to_string(out.join("reports.txt")).unwrap();
    assert!(text.contains("check: boolean"));
}

#[test]
fn shot_sweep_median_error_does_not_increase() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("depolarizing.json");
    let p = 0.3;
    SuperopSpectrum::from_pauli_rates(
        1,
        [(ps("I"), 1.0 - 3.0 * p / 4.0), (ps("X"), p / 4.0), (ps("Y"), p / 4.0), (ps("Z"), p / 4.0)],
    )
    .unwrap()
    .write_json(&inst)
    .unwrap();
    let mut cfg = ExperimentConfig::new(Task::LearnPauliChannel, 11, file_spec(&inst, 2), LearnParams::new(1, 0.2, 0.1));
    cfg.options.entangled = true;
    cfg.repetitions = 30;
    cfg.sweep.shots = vec![1_000, 10_000, 100_000];
    let cfg_path = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    assert_eq!(lowdeg(&["sweep", "--config", &cfg_path, "--out", out.to_str().unwrap()]), exit::OK);
    let rows = summarize(&read_records(&[out.join("records.jsonl")]).unwrap()).unwrap();
    let mut by_shots: Vec<(u128, f64)> = rows.iter().map(|r| (r.shots_override.unwrap(), r.median_error)).collect();
    by_shots.sort_by_key(|x| x.0);
    assert_eq!(by_shots.len(), 3);
    assert!(by_shots.windows(2).all(|w| w[1].1 <= w[0].1), "{by_shots:?}");
}

#[test]
fn records_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(
        Task::LearnUnitary,
        5,
        InstanceSpec {
            junta: Some(1),
            ..gen_spec(Family::JuntaUnitary, Some(3), 1)
        },
        LearnParams::new(1, 0.3, 0.1),
    );
    cfg.repetitions = 6;
    let cfg_path = write_config(dir.path(), &cfg);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("out{threads}"));
        let code = lowdeg(&["run", "--config", &cfg_path, "--threads", threads, "--out", out.to_str().unwrap()]);
        assert_eq!(code, exit::OK);
        outputs.push((
            fs::read(out.join("records.jsonl")).unwrap(),
            fs::read(out.join("results.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn generate_writes_instance_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = lowdeg(&[
        "generate", "--family", "pauli-mixture-channel", "--n", "3", "--d", "2", "--sparsity", "5", "--seed", "4",
        "--out", out,
    ]);
    assert_eq!(code, exit::OK);
    let path = dir.path().join("pauli-mixture-channel-n3-d2-s4.json");
    let Instance::Channel(s) = Instance::read(&path).unwrap() else {
        panic!("not a channel")
    };
    assert_eq!(s.len(), 5);
    let prov = read_provenance(&path).unwrap().unwrap();
    assert_eq!(prov.family, Family::PauliMixtureChannel);
    assert_eq!(prov.seed, 4);
    assert!(prov.verified_degree <= 2);
    assert_eq!(lowdeg(&["verify", path.to_str().unwrap()]), exit::OK);

    assert_eq!(lowdeg(&["generate", "--family", "address", "--d", "3", "--seed", "0", "--out", out]), exit::OK);
    let Instance::Boolean(f) = Instance::read(&dir.path().join("address-nauto-d3-s0.json")).unwrap() else {
        panic!("not Boolean")
    };
    assert_eq!(f.len(), 16);
    assert!(f.iter().all(|(_, c)| (c.abs() - 0.25).abs() < 1e-15));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    // config errors
    assert_eq!(lowdeg(&["run"]), exit::CONFIG);
    assert_eq!(lowdeg(&["run", "--config", "/nonexistent.toml"]), exit::CONFIG);
    assert_eq!(lowdeg(&["frobnicate"]), exit::CONFIG);
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "task = \"learn-channel\"\n[instance]\nfamily = \"address\"\nd = 2\n").unwrap();
    assert_eq!(lowdeg(&["run", "--config", bad.to_str().unwrap()]), exit::CONFIG);

    // budget
    let mut cfg = ExperimentConfig::new(
        Task::LearnUnitary,
        1,
        gen_spec(Family::JuntaUnitary, Some(2), 1),
        LearnParams::new(1, 0.3, 0.1),
    );
    cfg.options.budget = Some(100);
    let p = write_config(dir.path(), &cfg);
    assert_eq!(lowdeg(&["run", "--config", &p, "--out", out]), exit::BUDGET);

    // invariant: declared degree below the real one
    let inst = dir.path().join("dephase.json");
    SuperopSpectrum::from_pauli_rates(2, [(ps("II"), 0.5), (ps("ZZ"), 0.5)])
        .unwrap()
        .write_json(&inst)
        .unwrap();
    assert_eq!(lowdeg(&["verify", inst.to_str().unwrap(), "--d", "2"]), exit::INVARIANT);
    assert_eq!(lowdeg(&["verify", inst.to_str().unwrap(), "--d", "4"]), exit::OK);
    let cfg = ExperimentConfig::new(Task::LearnChannel, 1, file_spec(&inst, 2), LearnParams::new(2, 0.3, 0.1));
    let p = write_config(dir.path(), &cfg);
    assert_eq!(lowdeg(&["run", "--config", &p, "--out", out]), exit::INVARIANT);
}

#[test]
fn report_verb_and_mixed_input() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let cfg = ExperimentConfig::new(Task::BhVerify, 1, gen_spec(Family::Address, None, 2), LearnParams::default());
    let p = write_config(dir.path(), &cfg);
    assert_eq!(lowdeg(&["run", "--config", &p, "--out", a.to_str().unwrap()]), exit::OK);
    let mut cfg = ExperimentConfig::new(
        Task::LearnPoly,
        1,
        gen_spec(Family::BoundedPoly, Some(3), 1),
        LearnParams::new(1, 0.3, 0.1),
    );
    cfg.params.c_override = Some(0.05);
    let p = write_config(dir.path(), &cfg);
    assert_eq!(lowdeg(&["run", "--config", &p, "--out", b.to_str().unwrap()]), exit::OK);

    let ra = a.join("records.jsonl");
    let rb = b.join("records.jsonl");
    assert_eq!(lowdeg(&["report", ra.to_str().unwrap()]), exit::OK);
    let rows = summarize(&read_records(&[ra.clone()]).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].max_ratio - 1.0).abs() < 1e-9);
    assert_eq!(lowdeg(&["report", ra.to_str().unwrap(), rb.to_str().unwrap()]), exit::CONFIG);
}

#[test]
fn pauli_success_fraction_uses_half_epsilon() {
    let mut cfg = ExperimentConfig::new(
        Task::LearnPauliChannel,
        2,
        InstanceSpec {
            sparsity: Some(3),
            ..gen_spec(Family::PauliMixtureChannel, Some(2), 2)
        },
        LearnParams::new(1, 0.2, 0.1),
    );
    cfg.repetitions = 100;
    cfg.options.entangled = true;
    let recs = lowdeg::run(&cfg, 0).unwrap();
    let rows = summarize(&recs).unwrap();
    let expected = recs
        .iter()
        .filter(|r| r.learn.as_ref().unwrap().achieved.tv.unwrap() <= 0.1)
        .count() as f64
        / 100.0;
    assert_eq!(rows[0].success_fraction, expected);
    let errors: Vec<f64> = recs.iter().map(|r| r.learn.as_ref().unwrap().error).collect();
    assert_eq!(rows[0].median_error, median(&errors));
}

#[test]
fn binary_honours_env_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new(Task::BhVerify, 1, gen_spec(Family::Address, None, 2), LearnParams::default());
    let p = write_config(dir.path(), &cfg);
    let out = dir.path().join("env-out");
    let status = Command::new(env!("CARGO_BIN_EXE_lowdeg"))
        .args(["run", "--config", &p])
        .env("LOWDEG_OUT_DIR", &out)
        .env("LOWDEG_THREADS", "2")
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(out.join("records.jsonl").exists());
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["threads"], 2);

    let status = Command::new(env!("CARGO_BIN_EXE_lowdeg")).args(["run"]).output().unwrap();
    assert_eq!(status.status.code(), Some(exit::CONFIG));
}

#[test]
fn shipped_configs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "toml") {
            continue;
        }
        let cfg = ExperimentConfig::load(&path).unwrap();
        let verb = if cfg.sweep == Default::default() { "run" } else { "sweep" };
        let out = tempfile::tempdir().unwrap();
        let code = lowdeg(&[verb, "--config", path.to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
        assert_eq!(code, exit::OK, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 5);
}
