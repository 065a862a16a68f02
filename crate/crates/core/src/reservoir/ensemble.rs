use std::ops::Range;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;

use super::backend::Backend;
use super::encoding::{encode_phases, EncodingParams};
use super::noise::NoiseModel;
use super::observables::{observables_from_covariance, Normalization, ObservableSelection, Scaler};
use crate::rng::component_rng;
use crate::{Error, Result};

/// Observables of the previous step, noise included, and the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirState {
    pub observables: Vec<f64>,
    pub step: usize,
}

impl ReservoirState {
    pub fn zeros(len: usize) -> Self {
        Self { observables: vec![0.0; len], step: 0 }
    }
}

/// Which observables feed back into the encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackTaps {
    /// Every observable of every reservoir.
    All,
    /// Observable `k` of each reservoir (k = 0 is ⟨Δq²⟩ in the single-mode set).
    PerReservoir(usize),
}

/// Something that maps an input and a state to observables.
pub trait Dynamics {
    fn output_len(&self) -> usize;
    fn initial_state(&self) -> ReservoirState;
    fn step(&mut self, input: &[f64], state: &ReservoirState) -> Result<(Vec<f64>, ReservoirState)>;
}

struct Member {
    backend: Backend,
    scaler: Option<Scaler>,
    rng: ChaCha8Rng,
    phases: Range<usize>,
}

/// R reservoirs sharing one input and coupled through one feedback mask.
///
/// Every reservoir owns a contiguous block of the encoding's N phase
/// segments; R = 1 is a single reservoir.
pub struct MultiplexEnsemble {
    encoding: EncodingParams,
    members: Vec<Member>,
    selection: ObservableSelection,
    noise: NoiseModel,
    taps: Vec<usize>,
}

impl MultiplexEnsemble {
    /// `scalers[r]` normalizes reservoir r (required for min-max selections).
    /// Noise for reservoir r comes from the stream "noise/reservoir-r" of `seed`.
    pub fn new(
        encoding: EncodingParams,
        backends: Vec<Backend>,
        scalers: Vec<Option<Scaler>>,
        selection: ObservableSelection,
        noise: NoiseModel,
        feedback: FeedbackTaps,
        seed: u64,
    ) -> Result<Self> {
        encoding.validate()?;
        if backends.is_empty() || scalers.len() != backends.len() {
            return Err(Error::Dimension(format!(
                "{} backends and {} scalers",
                backends.len(),
                scalers.len()
            )));
        }
        if noise.len() != selection.len() {
            return Err(Error::Dimension(format!(
                "noise model has {} entries for {} observables",
                noise.len(),
                selection.len()
            )));
        }
        let m = selection.len();
        let mut members = Vec::with_capacity(backends.len());
        let mut start = 0;
        for (r, (backend, scaler)) in backends.into_iter().zip(scalers).enumerate() {
            if backend.n_modes() != selection.n() {
                return Err(Error::Dimension(format!(
                    "reservoir {r} measures {} modes, selection expects {}",
                    backend.n_modes(),
                    selection.n()
                )));
            }
            if selection.normalization() == Normalization::MinMax && scaler.is_none() {
                return Err(Error::InvalidParameter(format!("reservoir {r} lacks normalization extremes")));
            }
            let len = backend.segments();
            members.push(Member {
                backend,
                scaler,
                rng: component_rng(seed, &format!("noise/reservoir-{r}")),
                phases: start..start + len,
            });
            start += len;
        }
        if start != encoding.segments() {
            return Err(Error::Dimension(format!(
                "reservoirs consume {start} phases but the encoding has {}",
                encoding.segments()
            )));
        }
        let taps: Vec<usize> = match feedback {
            FeedbackTaps::All => (0..members.len() * m).collect(),
            FeedbackTaps::PerReservoir(k) => {
                if k >= m {
                    return Err(Error::InvalidParameter(format!("feedback observable {k} out of range")));
                }
                (0..members.len()).map(|r| r * m + k).collect()
            }
        };
        if taps.len() != encoding.mask.ncols() {
            return Err(Error::Dimension(format!(
                "mask has {} columns but {} feedback taps",
                encoding.mask.ncols(),
                taps.len()
            )));
        }
        Ok(Self { encoding, members, selection, noise, taps })
    }

    pub fn reservoirs(&self) -> usize {
        self.members.len()
    }

    pub fn selection(&self) -> &ObservableSelection {
        &self.selection
    }

    pub fn encoding(&self) -> &EncodingParams {
        &self.encoding
    }

    pub fn feedback(&self, state: &ReservoirState) -> Vec<f64> {
        self.taps.iter().map(|&t| state.observables[t]).collect()
    }

    /// Rows = steps after `washout`, columns = R·|sel| observables.
    pub fn run_sequence(&mut self, inputs: &[Vec<f64>], washout: usize) -> Result<DMatrix<f64>> {
        if washout >= inputs.len() {
            return Err(Error::InvalidParameter(format!(
                "washout {washout} must be shorter than the {} inputs",
                inputs.len()
            )));
        }
        let (rows, _) = self.run_from(self.initial_state(), inputs)?;
        Ok(rows.rows(washout, inputs.len() - washout).into_owned())
    }

    /// Drives the ensemble from `state`, returning every row and the final state.
    pub fn run_from(&mut self, mut state: ReservoirState, inputs: &[Vec<f64>]) -> Result<(DMatrix<f64>, ReservoirState)> {
        let mut out = DMatrix::zeros(inputs.len(), self.output_len());
        for (k, s) in inputs.iter().enumerate() {
            let (o, next) = self.step(s, &state)?;
            out.row_mut(k).copy_from_slice(&o);
            state = next;
        }
        Ok((out, state))
    }
}

impl Dynamics for MultiplexEnsemble {
    fn output_len(&self) -> usize {
        self.members.len() * self.selection.len()
    }

    fn initial_state(&self) -> ReservoirState {
        ReservoirState::zeros(self.output_len())
    }

    fn step(&mut self, input: &[f64], state: &ReservoirState) -> Result<(Vec<f64>, ReservoirState)> {
        if state.observables.len() != self.output_len() {
            return Err(Error::Dimension("state length differs from ensemble output".into()));
        }
        let phases = encode_phases(input, &self.feedback(state), &self.encoding)?;
        let mut out = Vec::with_capacity(self.output_len());
        for (r, m) in self.members.iter_mut().enumerate() {
            let sigma = m.backend.covariance(&phases[m.phases.clone()])?;
            let mut o = observables_from_covariance(&sigma, &self.selection, m.scaler.as_ref())?;
            self.noise.apply(&mut o, &mut m.rng);
            if o.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence(format!("reservoir {r} produced non-finite observables at step {}", state.step)));
            }
            out.extend_from_slice(&o);
        }
        let next = ReservoirState { observables: out.clone(), step: state.step + 1 };
        Ok((out, next))
    }
}
