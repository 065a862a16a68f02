use std::f64::consts::TAU;

use rand::Rng;

use super::BackendKind;
use crate::optics::{CrystalSpec, SourceConfig};
use crate::reservoir::presets::{GeneralPreset, NoisePreset};
use crate::reservoir::{
    Backend, EncodingParams, FeedbackTaps, MultiplexEnsemble, Normalization, ObservableSelection, Scaler,
};
use crate::rng::component_rng;
use crate::{Error, Result};

/// One single-mode global-phase reservoir per encoding segment, each
/// feeding back its ⟨Δq²⟩ through the R×R mask.
pub fn global_phase_ensemble(
    encoding: EncodingParams,
    backend: BackendKind,
    source: &SourceConfig,
    crystal: &CrystalSpec,
    noise: &NoisePreset,
    seed: u64,
) -> Result<MultiplexEnsemble> {
    let base = match backend {
        BackendKind::Analytic => Backend::single_mode(source.r_scale),
        BackendKind::FullPipeline => Backend::global_phase(&source.build(crystal, 1)?, 1)?,
    };
    let sel = ObservableSelection::single_mode(Normalization::MinMax);
    let scaler = base.analytic_scaler(&sel).expect("single-phase backend")?;
    let r = encoding.segments();
    MultiplexEnsemble::new(
        encoding,
        vec![base; r],
        vec![Some(scaler); r],
        sel.clone(),
        noise.model(sel.len())?,
        FeedbackTaps::PerReservoir(0),
        seed,
    )
}

/// Min-max extremes from `samples` random phase vectors, uniform on [0, 2π),
/// drawn from the "calibration" stream of `seed`.
pub fn calibrate_scaler(backend: &Backend, sel: &ObservableSelection, samples: usize, seed: u64) -> Result<Scaler> {
    let mut rng = component_rng(seed, "calibration");
    let rows = (0..samples)
        .map(|_| {
            let phases: Vec<f64> = (0..backend.segments()).map(|_| rng.random_range(0.0..TAU)).collect();
            sel.extract(&backend.covariance(&phases)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Scaler::from_batch(&rows, sel)
}

/// A single reservoir with N pump segments measured on n frexels; all
/// n(2n+1) covariance elements are observed and fed back.
pub fn general_ensemble(
    preset: &GeneralPreset,
    crystal: &CrystalSpec,
    segments: usize,
    modes: usize,
    backend: BackendKind,
    noise: &NoisePreset,
    seed: u64,
) -> Result<MultiplexEnsemble> {
    if segments == 0 || modes == 0 {
        return Err(Error::InvalidParameter("N and n must be positive".into()));
    }
    let source = preset.source.build(crystal, segments)?;
    let sel = ObservableSelection::upper_triangle(modes, Normalization::MinMax)?;
    let (backend, scaler) = if segments == 1 {
        let b = match backend {
            BackendKind::Analytic => Backend::analytic_from_source(&source, modes)?,
            BackendKind::FullPipeline => Backend::global_phase(&source, modes)?,
        };
        let s = b.analytic_scaler(&sel).expect("single-phase backend")?;
        (b, s)
    } else {
        if backend == BackendKind::Analytic {
            return Err(Error::InvalidParameter(format!(
                "the analytic backend needs N = 1, got N = {segments}"
            )));
        }
        let b = Backend::segmented(&source, modes)?;
        let s = calibrate_scaler(&b, &sel, preset.calibration_samples, seed)?;
        (b, s)
    };
    let omega = (0..segments).map(|i| source.pump.segment_angular_frequency(i)).collect();
    let encoding = preset.encoding(omega, sel.len(), seed)?;
    MultiplexEnsemble::new(
        encoding,
        vec![backend],
        vec![Some(scaler)],
        sel.clone(),
        noise.model(sel.len())?,
        FeedbackTaps::All,
        seed,
    )
}
