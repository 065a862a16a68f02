//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qrc_core::experiments::{BackendKind, TaskKind, TaskSpec};
use qrc_core::optics::{CrystalSpec, SourceConfig};
use qrc_core::reservoir::presets::{EncodingPreset, NoiseLevel, NoisePreset};

use crate::Failure;

/// A noise preset id or explicit standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Preset(String),
    /// `{ std = 0.03 }` or `{ std = [..] }`, the layout `fit-noise` writes.
    Inline(NoisePreset),
}

impl NoiseSpec {
    pub fn resolve(&self) -> Result<NoisePreset, Failure> {
        match self {
            NoiseSpec::Preset(id) => NoisePreset::builtin(id).map_err(|_| {
                Failure::config(format!(
                    "noise: unknown preset '{id}' (known: {})",
                    NoisePreset::builtin_ids().join(", ")
                ))
            }),
            NoiseSpec::Inline(p) => Ok(p.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NoiseSpec::Preset(id) => id.clone(),
            NoiseSpec::Inline(NoisePreset { std: NoiseLevel::Uniform(s) }) => format!("std={s}"),
            NoiseSpec::Inline(NoisePreset { std: NoiseLevel::PerObservable(v) }) => format!("std={v:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeOverrides {
    pub washout: Option<usize>,
    pub train: Option<usize>,
    pub test: Option<usize>,
}

/// Parameter sweep: one axis, a list of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: String,
    pub values: Vec<toml::Value>,
}

fn default_noise() -> NoiseSpec {
    NoiseSpec::Preset("noiseless".into())
}

fn one() -> usize {
    1
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_horizon() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: String,
    #[serde(default)]
    pub backend: Option<String>,
    /// Built-in encoding preset id.
    #[serde(default)]
    pub preset: Option<String>,
    /// Inline encoding parameters (same layout as a preset file); wins over `preset`.
    #[serde(default)]
    pub encoding: Option<EncodingPreset>,
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
    /// Reservoir count R (random global-phase presets, or memory-r{R}).
    #[serde(default)]
    pub reservoirs: Option<usize>,
    /// Pump segments N.
    #[serde(default = "one")]
    pub segments: usize,
    /// Measured modes n.
    #[serde(default = "one")]
    pub modes: usize,
    #[serde(default = "one")]
    pub tau: usize,
    #[serde(default)]
    pub sizes: Option<SizeOverrides>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub resplit: bool,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Crystal data file; the built-in KTP table when absent.
    #[serde(default)]
    pub crystal: Option<PathBuf>,
    #[serde(default)]
    pub source: Option<SourceConfig>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::config(format!("config: {}", e.to_string().trim())))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|f| Failure::config(format!("{}: {}", path.display(), f.message)))
    }

    pub fn task_kind(&self) -> Result<TaskKind, Failure> {
        TaskKind::parse(&self.task).map_err(|_| {
            let known: Vec<&str> = TaskKind::all().iter().map(|t| t.id()).collect();
            Failure::config(format!("task: unknown task '{}' (known: {})", self.task, known.join(", ")))
        })
    }

    /// Preset id reported in records.
    pub fn preset_label(&self) -> Result<String, Failure> {
        if self.encoding.is_some() {
            return Ok("inline".into());
        }
        let task = self.task_kind()?;
        Ok(match (&self.preset, task, self.reservoirs) {
            (Some(p), _, _) => p.clone(),
            (None, TaskKind::Memory, Some(r)) => format!("memory-r{r}"),
            (None, t, _) => t.default_preset().to_string(),
        })
    }

    /// Checks every key and builds the run description.
    pub fn to_spec(&self) -> Result<TaskSpec, Failure> {
        let task = self.task_kind()?;
        let mut spec = TaskSpec::new(task).map_err(Failure::from)?;
        if let Some(b) = &self.backend {
            spec.backend = BackendKind::parse(b)
                .map_err(|_| Failure::config(format!("backend: unknown backend '{b}' (analytic, full-pipeline)")))?;
        }
        spec.preset = match &self.encoding {
            Some(e) => e.clone(),
            None => {
                let id = self.preset_label()?;
                EncodingPreset::builtin(&id).map_err(|_| {
                    Failure::config(format!(
                        "preset: unknown preset '{id}' (known: {})",
                        EncodingPreset::builtin_ids().join(", ")
                    ))
                })?
            }
        };
        spec.noise = self.noise.resolve()?;
        if self.seeds.is_empty() {
            return Err(Failure::config("seeds: the seed list is empty"));
        }
        for (key, v) in [("segments", self.segments), ("modes", self.modes), ("tau", self.tau), ("horizon", self.horizon)] {
            if v == 0 {
                return Err(Failure::config(format!("{key}: must be positive")));
            }
        }
        if let Some(r) = self.reservoirs {
            if r == 0 {
                return Err(Failure::config("reservoirs: must be positive"));
            }
            if let EncodingPreset::GlobalPhase(p) = &spec.preset {
                if p.reservoirs() != r {
                    return Err(Failure::config(format!(
                        "reservoirs: preset '{}' has R = {}, config asks for {r}",
                        self.preset_label()?,
                        p.reservoirs()
                    )));
                }
            }
        }
        if !(self.lambda >= 0.0) {
            return Err(Failure::config(format!("lambda: {} must be >= 0", self.lambda)));
        }
        spec.reservoirs = self.reservoirs;
        spec.segments = self.segments;
        spec.modes = self.modes;
        spec.tau = self.tau;
        spec.lambda = self.lambda;
        spec.resplit = self.resplit;
        spec.horizon = self.horizon;
        if let Some(s) = self.sizes {
            let w = s.washout.unwrap_or(spec.sizes.washout);
            let tr = s.train.unwrap_or(spec.sizes.train);
            let te = s.test.unwrap_or(spec.sizes.test);
            if task != TaskKind::KernelQuality {
                for (key, v) in [("sizes.train", tr), ("sizes.test", te)] {
                    if v == 0 {
                        return Err(Failure::config(format!("{key}: must be positive")));
                    }
                }
            }
            spec.sizes.washout = w;
            spec.sizes.train = tr;
            spec.sizes.test = te;
        }
        if let Some(path) = &self.crystal {
            spec.crystal = CrystalSpec::load(path).map_err(|e| Failure::config(format!("crystal: {e}")))?;
        }
        if let Some(src) = &self.source {
            src.validate().map_err(|e| Failure::config(format!("source: {e}")))?;
            spec.source = src.clone();
            if let EncodingPreset::General(p) = &mut spec.preset {
                p.source = src.clone();
            }
        }
        Ok(spec)
    }

    /// SHA-256 over the canonical JSON form (object keys sorted); the output
    /// directory and the sweep block are not part of the experiment identity.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        c.sweep = None;
        let value = serde_json::to_value(&c).expect("config serializes");
        let text = serde_json::to_string(&canonical(value)).expect("json");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Recursively sorts object keys.
fn canonical(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

fn default_jsa_modes() -> usize {
    40
}

/// Configuration of the `jsa` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsaConfig {
    #[serde(default)]
    pub crystal: Option<PathBuf>,
    /// Use a constant-index crystal with this index instead of a data file.
    #[serde(default)]
    pub toy_index: Option<f64>,
    /// Schmidt modes to keep and dump.
    #[serde(default = "default_jsa_modes")]
    pub modes: usize,
    /// Pump segment phases; one segment with phase 0 when absent.
    #[serde(default)]
    pub phases: Option<Vec<f64>>,
    #[serde(default)]
    pub source: SourceConfig,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl JsaConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {}", path.display(), e.to_string().trim())))
    }

    pub fn crystal(&self) -> Result<CrystalSpec, Failure> {
        match (&self.crystal, self.toy_index) {
            (Some(_), Some(_)) => Err(Failure::config("crystal: give either a crystal file or toy_index, not both")),
            (Some(p), None) => CrystalSpec::load(p).map_err(|e| Failure::config(format!("crystal: {e}"))),
            (None, Some(n)) => {
                let c = CrystalSpec::toy(n, self.source.length.unwrap_or(0.01));
                c.validate().map_err(|e| Failure::config(format!("toy_index: {e}")))?;
                Ok(c)
            }
            (None, None) => Ok(CrystalSpec::ktp()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        let f = c.to_spec().unwrap_err();
        assert_eq!(f.code, Failure::CONFIG);
        f.message
    }

    #[test]
    fn errors_name_the_key() {
        assert!(err("task = \"xor\"\nseeds = []").starts_with("seeds:"));
        assert!(err("task = \"xor\"\npreset = \"nope\"").starts_with("preset:"));
        assert!(err("task = \"xor\"\nbackend = \"gpu\"").starts_with("backend:"));
        assert!(err("task = \"dance\"").starts_with("task:"));
        assert!(err("task = \"memory\"\nreservoirs = 5\npreset = \"memory-r3\"").starts_with("reservoirs:"));
        assert!(err("task = \"xor\"\nnoise = \"loud\"").starts_with("noise:"));
        assert!(err("task = \"xor\"\n[sizes]\ntrain = 0").starts_with("sizes.train:"));
        assert!(err("task = \"xor\"\ncrystal = \"/no/such/crystal.toml\"").contains("/no/such/crystal.toml"));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let f = ExperimentConfig::from_toml_str("task = \"xor\"\ntrian = 3").unwrap_err();
        assert!(f.message.contains("trian"), "{}", f.message);
    }

    #[test]
    fn memory_preset_follows_reservoir_count() {
        let c = ExperimentConfig::from_toml_str("task = \"memory\"\nreservoirs = 3").unwrap();
        assert_eq!(c.preset_label().unwrap(), "memory-r3");
        assert!(c.to_spec().is_ok());
    }

    #[test]
    fn inline_noise_level() {
        let c = ExperimentConfig::from_toml_str("task = \"xor\"\nnoise = { std = 0.03 }").unwrap();
        assert!(c.to_spec().is_ok(), "{:?}", c.to_spec().err());
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = ExperimentConfig::from_toml_str("task = \"xor\"\nout = \"a\"").unwrap();
        let b = ExperimentConfig::from_toml_str("task = \"xor\"\nout = \"b\"").unwrap();
        let c = ExperimentConfig::from_toml_str("task = \"xor\"\nseeds = [1]").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }
}
