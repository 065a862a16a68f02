//! Feedback-driven reservoir: inputs and previous observables set the pump
//! phases, the optics produce a covariance matrix, and selected covariance
//! elements (plus measurement noise) are the reservoir output.

pub mod backend;
pub mod encoding;
pub mod ensemble;
pub mod kernel;
pub mod noise;
pub mod observables;
pub mod presets;

pub use backend::{Backend, SegmentedPipeline};
pub use encoding::{encode_phases, phase_from_voltage, EncodingParams, PhaseMap, V_HALF_PI};
pub use ensemble::{Dynamics, FeedbackTaps, MultiplexEnsemble, ReservoirState};
pub use kernel::kernel_quality;
pub use noise::{fit_noise, fit_noise_sample_mean, NoiseModel, NoiseTrace};
pub use observables::{observables_from_covariance, Normalization, Observable, ObservableSelection, Scaler};
