//! End-to-end benchmark runs: build an ensemble from a preset, drive it with
//! a task, train the readout and score the test span.

mod ensembles;
mod runs;

pub use ensembles::{calibrate_scaler, general_ensemble, global_phase_ensemble};
pub use runs::{
    double_scroll_trajectory, run_double_scroll, run_kernel_quality, run_memory, run_parity, run_task, run_xor,
    DoubleScrollOutcome,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::optics::{CrystalSpec, SourceConfig};
use crate::reservoir::presets::{EncodingPreset, NoisePreset};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Xor,
    Memory,
    Parity,
    KernelQuality,
    DoubleScroll,
}

impl TaskKind {
    pub fn id(self) -> &'static str {
        match self {
            TaskKind::Xor => "xor",
            TaskKind::Memory => "memory",
            TaskKind::Parity => "parity",
            TaskKind::KernelQuality => "kernel-quality",
            TaskKind::DoubleScroll => "double-scroll",
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        Ok(match id {
            "xor" => TaskKind::Xor,
            "memory" => TaskKind::Memory,
            "parity" => TaskKind::Parity,
            "kernel-quality" => TaskKind::KernelQuality,
            "double-scroll" => TaskKind::DoubleScroll,
            _ => return Err(Error::InvalidParameter(format!("unknown task '{id}'"))),
        })
    }

    pub fn all() -> [TaskKind; 5] {
        [TaskKind::Xor, TaskKind::Memory, TaskKind::Parity, TaskKind::KernelQuality, TaskKind::DoubleScroll]
    }

    /// Preset used when none is given.
    pub fn default_preset(self) -> &'static str {
        match self {
            TaskKind::Xor => "xor",
            TaskKind::Memory => "memory-r5",
            TaskKind::Parity | TaskKind::KernelQuality => "general-encoding",
            TaskKind::DoubleScroll => "double-scroll",
        }
    }

    pub fn default_sizes(self) -> Sizes {
        match self {
            TaskKind::Xor => Sizes { washout: 10, train: 70, test: 49 },
            TaskKind::Memory => Sizes { washout: 20, train: 500, test: 200 },
            TaskKind::Parity => Sizes { washout: 20, train: 600, test: 200 },
            TaskKind::KernelQuality => Sizes { washout: 50, train: 0, test: 0 },
            TaskKind::DoubleScroll => Sizes { washout: 50, train: 350, test: 100 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    /// Closed-form global-phase covariance (N = 1 only).
    Analytic,
    /// JSA → Schmidt → frexel basis.
    FullPipeline,
}

impl BackendKind {
    pub fn parse(id: &str) -> Result<Self> {
        match id {
            "analytic" => Ok(BackendKind::Analytic),
            "full-pipeline" | "full" => Ok(BackendKind::FullPipeline),
            _ => Err(Error::InvalidParameter(format!("unknown backend '{id}'"))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            BackendKind::Analytic => "analytic",
            BackendKind::FullPipeline => "full-pipeline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sizes {
    pub washout: usize,
    pub train: usize,
    pub test: usize,
}

impl Sizes {
    pub fn total(&self) -> usize {
        self.washout + self.train + self.test
    }
}

/// Everything one seeded run needs.
#[derive(Debug, Clone)]
pub struct TaskSpec {
    pub task: TaskKind,
    pub preset: EncodingPreset,
    pub backend: BackendKind,
    pub noise: NoisePreset,
    /// Overrides the preset's reservoir count (random global-phase presets).
    pub reservoirs: Option<usize>,
    /// Pump segments N (general encoding).
    pub segments: usize,
    /// Measured modes n (general encoding).
    pub modes: usize,
    /// Delay τ for memory and parity.
    pub tau: usize,
    pub sizes: Sizes,
    /// Ridge penalty, 0 for plain least squares.
    pub lambda: f64,
    /// XOR only: shuffle post-washout rows before the train/test split.
    pub resplit: bool,
    /// Closed-loop window length (double scroll); the test span holds test / horizon windows.
    pub horizon: usize,
    pub crystal: CrystalSpec,
    /// Source for full-pipeline global-phase runs (general presets carry their own).
    pub source: SourceConfig,
}

impl TaskSpec {
    /// Defaults for `task` with its default preset and no noise.
    pub fn new(task: TaskKind) -> Result<Self> {
        Ok(Self {
            task,
            preset: EncodingPreset::builtin(task.default_preset())?,
            backend: BackendKind::Analytic,
            noise: NoisePreset::builtin("noiseless")?,
            reservoirs: None,
            segments: 1,
            modes: 1,
            tau: 1,
            sizes: task.default_sizes(),
            lambda: 0.0,
            resplit: false,
            horizon: 10,
            crystal: CrystalSpec::ktp(),
            source: SourceConfig::default(),
        })
    }

    pub fn with_preset(mut self, id: &str) -> Result<Self> {
        self.preset = EncodingPreset::builtin(id)?;
        Ok(self)
    }

    pub fn with_noise(mut self, id: &str) -> Result<Self> {
        self.noise = NoisePreset::builtin(id)?;
        Ok(self)
    }
}

/// One readout output next to its target.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub step: usize,
    pub channel: usize,
    pub value: f64,
    pub target: f64,
}

#[derive(Debug, Clone)]
pub struct TaskResult {
    /// (metric name, value), in a fixed order per task.
    pub metrics: Vec<(String, f64)>,
    pub predictions: Vec<PredictionRow>,
    /// Every observable row of the driven run, washout included.
    pub trace: DMatrix<f64>,
    /// Names of the observables of one reservoir.
    pub observable_names: Vec<String>,
}

impl TaskResult {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}
