//! Parameter presets shipped with the crate (see `presets/*.toml`).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encoding::{EncodingParams, PhaseMap};
use super::noise::NoiseModel;
use crate::optics::source::SourceConfig;
use crate::rng::component_rng;
use crate::{Error, Result};

const BUILTIN: &[(&str, &str)] = &[
    ("xor", include_str!("../../presets/xor.toml")),
    ("memory-r1", include_str!("../../presets/memory_r1.toml")),
    ("memory-r3", include_str!("../../presets/memory_r3.toml")),
    ("memory-r5", include_str!("../../presets/memory_r5.toml")),
    ("double-scroll", include_str!("../../presets/double_scroll.toml")),
    ("general-encoding", include_str!("../../presets/general_encoding.toml")),
];

const NOISE: &str = include_str!("../../presets/noise.toml");

fn one() -> f64 {
    1.0
}

/// Fixed R-reservoir global-phase table; values × `scale` are volts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalPhasePreset {
    pub v_half_pi: f64,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub offset: f64,
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub beta: Option<Vec<f64>>,
    pub mask: Vec<Vec<f64>>,
}

impl GlobalPhasePreset {
    pub fn reservoirs(&self) -> usize {
        self.alpha.len()
    }

    pub fn encoding(&self) -> Result<EncodingParams> {
        let r = self.alpha.len();
        if self.mask.len() != r || self.mask.iter().any(|row| row.len() != r) {
            return Err(Error::Preset(format!("mask must be {r}x{r}")));
        }
        let beta = self.beta.clone().unwrap_or_else(|| vec![0.0; r]);
        let s = self.scale;
        EncodingParams::new(
            self.alpha.iter().map(|a| a * s).collect(),
            beta.iter().map(|b| b * s).collect(),
            DMatrix::from_fn(r, r, |i, j| self.mask[i][j] * s),
            PhaseMap::Voltage { v_half_pi: self.v_half_pi, offset: self.offset },
        )
    }
}

/// Random global-phase ensemble, values in units of V_{π/2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomGlobalPhasePreset {
    pub v_half_pi: f64,
    #[serde(default)]
    pub offset: f64,
    pub reservoirs: usize,
    pub input_range: f64,
    pub mask_scale: f64,
}

/// Rescales a matrix to largest singular value `target`.
fn spectral_scale(m: DMatrix<f64>, target: f64) -> DMatrix<f64> {
    let top = m.singular_values().max();
    if top > 0.0 {
        m * (target / top)
    } else {
        m
    }
}

impl RandomGlobalPhasePreset {
    /// Draws α ~ U[−w, w], M ~ U[−1, 1] (spectral norm set to mask_scale), β = 0.
    pub fn encoding(&self, reservoirs: usize, seed: u64) -> Result<EncodingParams> {
        if reservoirs == 0 {
            return Err(Error::Preset("at least one reservoir required".into()));
        }
        let mut rng = component_rng(seed, "encoding/random-global-phase");
        let w = self.input_range;
        let alpha: Vec<f64> = (0..reservoirs).map(|_| rng.random_range(-w..=w) * self.v_half_pi).collect();
        let mask = DMatrix::from_fn(reservoirs, reservoirs, |_, _| rng.random_range(-1.0..=1.0));
        let mask = spectral_scale(mask, self.mask_scale * self.v_half_pi);
        EncodingParams::new(
            alpha,
            vec![0.0; reservoirs],
            mask,
            PhaseMap::Voltage { v_half_pi: self.v_half_pi, offset: self.offset },
        )
    }
}

/// General encoding: random α, β, mask in units of a delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralPreset {
    /// Seconds.
    pub delay: f64,
    pub input_range: f64,
    pub bias_range: f64,
    pub mask_low: f64,
    pub mask_high: f64,
    pub mask_scale: f64,
    #[serde(default)]
    pub offset: f64,
    pub calibration_samples: usize,
    #[serde(default)]
    pub source: SourceConfig,
}

impl GeneralPreset {
    /// `omega[i]` is the centre angular frequency of segment i; `taps` the
    /// number of fed-back observables.
    pub fn encoding(&self, omega: Vec<f64>, taps: usize, seed: u64) -> Result<EncodingParams> {
        let n = omega.len();
        if n == 0 || taps == 0 {
            return Err(Error::Preset("general encoding needs segments and feedback taps".into()));
        }
        let mut rng = component_rng(seed, "encoding/general");
        let d = self.delay;
        let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(-self.input_range..=self.input_range) * d).collect();
        let beta: Vec<f64> = (0..n).map(|_| rng.random_range(-self.bias_range..=self.bias_range) * d).collect();
        let mask = DMatrix::from_fn(n, taps, |_, _| rng.random_range(self.mask_low..=self.mask_high));
        let mask = spectral_scale(mask, self.mask_scale * d);
        EncodingParams::new(alpha, beta, mask, PhaseMap::Delay { omega, offset: self.offset })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EncodingPreset {
    GlobalPhase(GlobalPhasePreset),
    RandomGlobalPhase(RandomGlobalPhasePreset),
    General(GeneralPreset),
}

impl EncodingPreset {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Preset(e.to_string()))
    }

    pub fn builtin(id: &str) -> Result<Self> {
        let (_, text) = BUILTIN
            .iter()
            .find(|(k, _)| *k == id)
            .ok_or_else(|| Error::Preset(format!("unknown encoding preset '{id}'")))?;
        Self::from_toml_str(text)
    }

    pub fn builtin_ids() -> Vec<&'static str> {
        BUILTIN.iter().map(|(k, _)| *k).collect()
    }
}

/// Scalar or per-observable standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseLevel {
    Uniform(f64),
    PerObservable(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisePreset {
    pub std: NoiseLevel,
}

impl NoisePreset {
    pub fn model(&self, len: usize) -> Result<NoiseModel> {
        match &self.std {
            NoiseLevel::Uniform(s) => NoiseModel::uniform(*s, len),
            NoiseLevel::PerObservable(v) if v.len() == len => NoiseModel::new(v.clone()),
            NoiseLevel::PerObservable(v) => Err(Error::Preset(format!(
                "noise preset lists {} values for {len} observables",
                v.len()
            ))),
        }
    }

    /// Builtin presets: noiseless, low, average, experimental.
    pub fn builtin(id: &str) -> Result<Self> {
        let table: BTreeMap<String, NoisePreset> = toml::from_str(NOISE).map_err(|e| Error::Preset(e.to_string()))?;
        table.get(id).cloned().ok_or_else(|| Error::Preset(format!("unknown noise preset '{id}'")))
    }

    pub fn builtin_ids() -> Vec<String> {
        let table: BTreeMap<String, NoisePreset> = toml::from_str(NOISE).expect("embedded noise presets");
        table.into_keys().collect()
    }
}
