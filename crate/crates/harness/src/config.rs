//! Experiment configuration, read from TOML.
//!
//! ```toml
//! task = "learn-channel"
//! seed = 7
//! repetitions = 20
//!
//! [instance]
//! family = "pauli-mixture-channel"
//! n = 3
//! d = 2
//!
//! [params]
//! d = 2
//! epsilon = 0.15
//! delta = 0.1
//! ```

use std::path::{Path, PathBuf};

use lowdeg_core::learn::{BooleanMode, LearnParams};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::instance::{Family, InstanceGenerator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    LearnChannel,
    LearnUnitary,
    LearnPauliChannel,
    LearnBoolean,
    LearnPoly,
    LearnTensor,
    BhVerify,
    Qqa,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::LearnChannel => "learn-channel",
            Task::LearnUnitary => "learn-unitary",
            Task::LearnPauliChannel => "learn-pauli-channel",
            Task::LearnBoolean => "learn-boolean",
            Task::LearnPoly => "learn-poly",
            Task::LearnTensor => "learn-tensor",
            Task::BhVerify => "bh-verify",
            Task::Qqa => "qqa",
        }
    }

    /// Tasks whose records carry an inequality report rather than a learner run.
    pub fn is_inequality(self) -> bool {
        matches!(self, Task::BhVerify | Task::Qqa)
    }
}

/// Where the ground truth comes from: a generator or a file written by
/// `generate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Declared degree; required for both sources.
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Fixes the instance across repetitions; otherwise every repetition
    /// draws a fresh one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceSpec {
    pub fn generator(&self) -> Option<InstanceGenerator> {
        self.family.map(|family| InstanceGenerator {
            family,
            n: self.n,
            d: self.d,
            sparsity: self.sparsity,
            junta: self.junta,
            terms: self.terms,
            m: self.m,
            seed: self.seed,
        })
    }

    pub fn from_generator(g: &InstanceGenerator) -> Self {
        Self {
            family: Some(g.family),
            file: None,
            n: g.n,
            d: g.d,
            sparsity: g.sparsity,
            junta: g.junta,
            terms: g.terms,
            m: g.m,
            seed: g.seed,
        }
    }
}

/// Task-specific knobs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskOptions {
    /// Boolean learner mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<BooleanMode>,
    /// Use Bell sampling of the Choi state for Pauli channels.
    pub entangled: bool,
    /// Sample count for the tensor learner; defaults to the theory count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// Total shot cap per run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u128>,
}

/// Sweep axes; the sweep runs their Cartesian product.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub shot_multipliers: Vec<f64>,
    /// Absolute shot counts (sets `shots_override`).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub shots: Vec<u128>,
    /// Declared degrees (instance and learner).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub records: String,
    pub csv: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self {
            dir: None,
            records: "records.jsonl".into(),
            csv: "results.csv".into(),
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub seed: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub params: LearnParams,
    #[serde(default)]
    pub options: TaskOptions,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn new(task: Task, seed: u64, instance: InstanceSpec, params: LearnParams) -> Self {
        Self {
            task,
            seed,
            repetitions: 1,
            instance,
            params,
            options: TaskOptions::default(),
            sweep: SweepSpec::default(),
            output: OutputPaths::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads and validates a config file; relative instance paths resolve
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
        if let Some(f) = &cfg.instance.file {
            if f.is_relative() {
                cfg.instance.file = Some(path.parent().unwrap_or(Path::new(".")).join(f));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.instance.family, &self.instance.file) {
            (Some(_), Some(_)) => return Err(HarnessError::config("instance has both family and file")),
            (None, None) => return Err(HarnessError::config("instance needs a family or a file")),
            (None, Some(f)) if !f.exists() => {
                return Err(HarnessError::config(format!("instance file {} does not exist", f.display())))
            }
            _ => {}
        }
        if self.repetitions == 0 {
            return Err(HarnessError::config("repetitions must be at least 1"));
        }
        if !self.task.is_inequality() {
            self.params.validate()?;
        }
        if self.task == Task::LearnBoolean && self.options.mode.is_none() {
            return Err(HarnessError::config("learn-boolean needs options.mode (classical or quantum)"));
        }
        if self.sweep.shot_multipliers.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
            return Err(HarnessError::config("shot multipliers must be finite and non-negative"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
task = "learn-channel"
seed = 7
repetitions = 3

[instance]
family = "pauli-mixture-channel"
n = 3
d = 2
sparsity = 5

[params]
d = 2
epsilon = 0.15
delta = 0.1
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml(EXAMPLE).unwrap();
        assert_eq!(cfg.task, Task::LearnChannel);
        assert_eq!(cfg.params.shot_multiplier, 1.0);
        assert_eq!(cfg.output.records, "records.jsonl");
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn seed_is_mandatory() {
        let text = EXAMPLE.replace("seed = 7\n", "");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(HarnessError::Config(_))));
    }

    #[test]
    fn unknown_fields_and_missing_files_are_config_errors() {
        let text = EXAMPLE.replace("sparsity = 5", "sparsity = 5\ncolour = 1");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(HarnessError::Config(_))));
        let text = EXAMPLE.replace("family = \"pauli-mixture-channel\"", "file = \"/nonexistent/x.json\"");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(HarnessError::Config(_))));
    }
}
