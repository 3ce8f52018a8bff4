//! Ground-truth instance families, their degree checks, and the on-disk
//! format (a spectrum or algorithm document plus a provenance sidecar).

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use lowdeg_core::bh::{address_bits, address_function};
use lowdeg_core::pauli::io::{SpectrumDocument, SpectrumIo, SpectrumKind};
use lowdeg_core::pauli::{spectrum_of_operator, BooleanSpectrum, DenseOperator, OperatorSpectrum, SuperopSpectrum};
use lowdeg_core::qqa::QueryAlgorithm;
use lowdeg_core::random::{
    random_boolean_junta, random_bounded_poly, random_junta_conjugation, random_junta_unitary, random_pauli_mixture,
    random_sites,
};
use lowdeg_core::rng::{stream, StreamRng};
use lowdeg_core::sim::Target;
use lowdeg_core::C64;
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Stream id for instance generation, distinct from the oracle streams.
const GENERATOR_STREAM: u64 = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    PauliMixtureChannel,
    JuntaConjugatedChannel,
    JuntaUnitary,
    PhaseEvolutionUnitary,
    BooleanJunta,
    Address,
    BoundedPoly,
    RandomQqa,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::PauliMixtureChannel => "pauli-mixture-channel",
            Family::JuntaConjugatedChannel => "junta-conjugated-channel",
            Family::JuntaUnitary => "junta-unitary",
            Family::PhaseEvolutionUnitary => "phase-evolution-unitary",
            Family::BooleanJunta => "boolean-junta",
            Family::Address => "address",
            Family::BoundedPoly => "bounded-poly",
            Family::RandomQqa => "random-qqa",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| HarnessError::config(format!("unknown instance family {s:?}")))
    }
}

/// Family plus its parameters. `seed` is filled in by the runner when absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceGenerator {
    pub family: Family,
    /// Qubits, Boolean variables, or query-register dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Declared degree (query count for `random-qqa`).
    pub d: usize,
    /// Number of Pauli error terms, identity included.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<usize>,
    /// Junta size for the junta families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junta: Option<usize>,
    /// Mixture terms for `bounded-poly`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    /// Workspace dimension for `random-qqa`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceGenerator {
    pub fn new(family: Family, n: usize, d: usize) -> Self {
        Self {
            family,
            n: Some(n),
            d,
            sparsity: None,
            junta: None,
            terms: None,
            m: None,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn n_or(&self, default: Option<usize>) -> Result<usize> {
        self.n
            .or(default)
            .ok_or_else(|| HarnessError::config(format!("{} needs n", self.family)))
    }

    /// Stable identifier of the generated object.
    pub fn instance_id(&self) -> String {
        let n = self.n.map_or_else(|| "auto".to_string(), |n| n.to_string());
        match self.seed {
            Some(s) => format!("{}-n{n}-d{}-s{s}", self.family, self.d),
            None => format!("{}-n{n}-d{}", self.family, self.d),
        }
    }

    /// Builds the instance and checks its degree against `d`.
    pub fn generate(&self) -> Result<Instance> {
        let seed = self
            .seed
            .ok_or_else(|| HarnessError::config("instance generator has no seed"))?;
        let mut rng = stream(seed, GENERATOR_STREAM);
        let d = self.d;
        if d == 0 {
            return Err(HarnessError::config("declared degree must be at least 1"));
        }
        let instance = match self.family {
            Family::PauliMixtureChannel => {
                let n = self.n_or(None)?;
                if d < 2 {
                    return Err(HarnessError::config("pauli-mixture-channel needs d ≥ 2"));
                }
                Instance::Channel(random_pauli_mixture(n, d / 2, self.sparsity.unwrap_or(4), &mut rng)?)
            }
            Family::JuntaConjugatedChannel => {
                let n = self.n_or(None)?;
                let k = self.junta.unwrap_or(d / 2);
                if k == 0 || 2 * k > d {
                    return Err(HarnessError::config(format!("junta size {k} does not fit degree {d}")));
                }
                Instance::Channel(random_junta_conjugation(n, k, &mut rng)?)
            }
            Family::JuntaUnitary => {
                let n = self.n_or(None)?;
                let k = self.junta.unwrap_or(d);
                if k > d {
                    return Err(HarnessError::config(format!("junta size {k} exceeds degree {d}")));
                }
                Instance::Unitary(random_junta_unitary(n, k, &mut rng)?.0)
            }
            Family::PhaseEvolutionUnitary => {
                let n = self.n_or(None)?;
                let k = self.junta.unwrap_or(d);
                if k > d {
                    return Err(HarnessError::config(format!("junta size {k} exceeds degree {d}")));
                }
                Instance::Unitary(phase_evolution(n, k, &mut rng)?)
            }
            Family::BooleanJunta => {
                let n = self.n_or(None)?;
                Instance::Boolean(random_boolean_junta(n, self.junta.unwrap_or(d), &mut rng)?)
            }
            Family::Address => {
                let f = address_function(d)?;
                let n = self.n_or(Some(f.n()))?;
                if n < address_bits(d) {
                    return Err(HarnessError::config(format!(
                        "address function of degree {d} needs n ≥ {}",
                        address_bits(d)
                    )));
                }
                if n == f.n() {
                    Instance::Boolean(f)
                } else {
                    let vars = random_sites(n, f.n(), &mut rng);
                    Instance::Boolean(f.embed(n, &vars)?)
                }
            }
            Family::BoundedPoly => {
                let n = self.n_or(None)?;
                Instance::Bounded(random_bounded_poly(n, d, self.terms.unwrap_or(3), &mut rng)?)
            }
            Family::RandomQqa => {
                let n = self.n_or(None)?;
                Instance::Qqa(QueryAlgorithm::random(n, self.m.unwrap_or(2), d, &mut rng)?)
            }
        };
        instance.check_degree(d)?;
        Ok(instance)
    }
}

/// Diagonal unitary `exp(−i Σ_S θ_S Z_S)` over subsets `S` of `k` random sites.
fn phase_evolution(n: usize, k: usize, rng: &mut StreamRng) -> Result<OperatorSpectrum> {
    if k == 0 || k > n {
        return Err(HarnessError::config(format!("junta size {k} for n = {n}")));
    }
    let sites = random_sites(n, k, rng);
    let dim = 1usize << k;
    let thetas: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut diag = DMatrix::<C64>::zeros(dim, dim);
    for z in 0..dim {
        // Z_S eigenvalue on basis state z is (−1)^{|S ∩ z|}
        let phase: f64 = thetas
            .iter()
            .enumerate()
            .map(|(s, t)| if (s & z).count_ones() % 2 == 1 { -t } else { *t })
            .sum();
        diag[(z, z)] = C64::from_polar(1.0, -phase);
    }
    Ok(spectrum_of_operator(&DenseOperator::new(diag)?).embed(n, &sites)?)
}

/// A hidden ground truth.
#[derive(Clone, Debug)]
pub enum Instance {
    Channel(SuperopSpectrum),
    Unitary(OperatorSpectrum),
    /// `±1`-valued function.
    Boolean(BooleanSpectrum<f64>),
    /// Function into `[−1, 1]`.
    Bounded(BooleanSpectrum<f64>),
    Qqa(QueryAlgorithm),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Channel(_) => "channel",
            Instance::Unitary(_) => "unitary",
            Instance::Boolean(_) => "boolean",
            Instance::Bounded(_) => "bounded",
            Instance::Qqa(_) => "qqa",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Channel(s) => s.n(),
            Instance::Unitary(u) => u.n(),
            Instance::Boolean(f) | Instance::Bounded(f) => f.n(),
            Instance::Qqa(a) => a.n(),
        }
    }

    /// Degree, or the query count for algorithms.
    pub fn degree(&self) -> usize {
        match self {
            Instance::Channel(s) => s.degree(),
            Instance::Unitary(u) => u.degree(),
            Instance::Boolean(f) | Instance::Bounded(f) => f.degree(),
            Instance::Qqa(a) => a.d(),
        }
    }

    pub fn check_degree(&self, d: usize) -> Result<usize> {
        let found = self.degree();
        let ok = match self {
            Instance::Qqa(_) => found == d,
            _ => found <= d,
        };
        if !ok {
            return Err(HarnessError::Invariant(format!(
                "{} instance has degree {found}, declared {d}",
                self.kind()
            )));
        }
        Ok(found)
    }

    /// Oracle target; algorithms have none.
    pub fn target(&self) -> Option<Target> {
        match self {
            Instance::Channel(s) => Some(Target::Channel(s.clone())),
            Instance::Unitary(u) => Some(Target::Unitary(u.clone())),
            Instance::Boolean(f) => Some(Target::Boolean(f.clone())),
            Instance::Bounded(f) => Some(Target::BoundedPoly(f.clone())),
            Instance::Qqa(_) => None,
        }
    }

    /// Writes the object to `path` (JSON).
    pub fn write(&self, path: &Path) -> Result<()> {
        match self {
            Instance::Channel(s) => s.write_json(path)?,
            Instance::Unitary(u) => u.write_json(path)?,
            Instance::Boolean(f) | Instance::Bounded(f) => f.write_json(path)?,
            Instance::Qqa(a) => a.write_json(File::create(path)?)?,
        }
        Ok(())
    }

    /// Reads an instance file. Boolean documents load as `Boolean` when every
    /// value is `±1` and as `Bounded` otherwise.
    pub fn read(path: &Path) -> Result<Instance> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| HarnessError::config(format!("{} is not JSON: {e}", path.display())))?;
        if value.get("unitaries").is_some() {
            return Ok(Instance::Qqa(QueryAlgorithm::read_json(BufReader::new(File::open(path)?))?));
        }
        let doc = SpectrumDocument::from_json(&text)?;
        Ok(match doc.kind {
            SpectrumKind::Superop => {
                let s = SuperopSpectrum::from_document(&doc)?;
                s.check_channel(1e-9)?;
                Instance::Channel(s)
            }
            SpectrumKind::Operator => {
                let u = OperatorSpectrum::from_document(&doc)?;
                Target::Unitary(u.clone()).checked()?;
                Instance::Unitary(u)
            }
            SpectrumKind::Boolean => {
                let f = BooleanSpectrum::<f64>::from_document(&doc)?;
                if Target::Boolean(f.clone()).checked().is_ok() {
                    Instance::Boolean(f)
                } else {
                    Target::BoundedPoly(f.clone()).checked()?;
                    Instance::Bounded(f)
                }
            }
        })
    }
}

/// Sidecar written next to every generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub family: Family,
    pub params: InstanceGenerator,
    pub seed: u64,
    pub verified_degree: usize,
}

pub fn provenance_path(instance: &Path) -> PathBuf {
    let mut name = instance.file_stem().unwrap_or_default().to_os_string();
    name.push(".provenance.json");
    instance.with_file_name(name)
}

/// Generates, verifies and writes `<dir>/<instance_id>.json` with its
/// sidecar. Returns the instance path.
pub fn generate_to(generator: &InstanceGenerator, dir: &Path) -> Result<(PathBuf, Instance)> {
    let instance = generator.generate()?;
    let verified_degree = instance.check_degree(generator.d)?;
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.json", generator.instance_id()));
    instance.write(&path)?;
    let prov = Provenance {
        family: generator.family,
        params: generator.clone(),
        seed: generator.seed.expect("generate checked the seed"),
        verified_degree,
    };
    std::fs::write(provenance_path(&path), serde_json::to_string_pretty(&prov)? + "\n")?;
    Ok((path, instance))
}

/// Reads the sidecar of an instance file, if present.
pub fn read_provenance(instance: &Path) -> Result<Option<Provenance>> {
    let p = provenance_path(instance);
    if !p.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&p)?;
    Ok(Some(serde_json::from_str(&text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_mixture_weights() {
        let g = InstanceGenerator {
            sparsity: Some(5),
            ..InstanceGenerator::new(Family::PauliMixtureChannel, 3, 2).with_seed(1)
        };
        let Instance::Channel(s) = g.generate().unwrap() else {
            panic!()
        };
        assert_eq!(s.len(), 5);
        assert!(s.degree() <= 2);
        assert!(s.is_pauli_channel());
    }

    #[test]
    fn address_has_sixteen_quarter_coefficients() {
        let g = InstanceGenerator::new(Family::Address, 8, 3).with_seed(0);
        let Instance::Boolean(f) = g.generate().unwrap() else {
            panic!()
        };
        assert_eq!(f.len(), 16);
        assert!(f.iter().all(|(_, c)| (c.abs() - 0.25).abs() < 1e-15));
    }

    #[test]
    fn phase_evolution_is_a_diagonal_junta() {
        let g = InstanceGenerator {
            junta: Some(2),
            ..InstanceGenerator::new(Family::PhaseEvolutionUnitary, 5, 2).with_seed(4)
        };
        let Instance::Unitary(u) = g.generate().unwrap() else {
            panic!()
        };
        assert!(u.degree() <= 2);
        assert!((u.norm_sq() - 1.0).abs() < 1e-12);
        assert!(u.iter().all(|(x, _)| x.word().iter().all(|&s| s == 0 || s == 3)));
    }

    #[test]
    fn junta_unitary_in_five_qubits() {
        let g = InstanceGenerator::new(Family::JuntaUnitary, 5, 2).with_seed(9);
        let inst = g.generate().unwrap();
        assert_eq!(inst.n(), 5);
        assert!(inst.degree() <= 2);
    }

    #[test]
    fn family_names_parse() {
        for f in ["pauli-mixture-channel", "random-qqa", "address"] {
            assert_eq!(f.parse::<Family>().unwrap().name(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }
}
