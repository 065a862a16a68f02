//! Squeezed-light generation: joint spectral amplitude, Schmidt supermodes and
//! covariance matrices in frexel measurement bases.

pub mod analytic;
pub mod basis;
pub mod covariance;
pub mod crystal;
pub mod grid;
pub mod jsa;
pub mod pump;
pub mod schmidt;
pub mod source;
pub mod symplectic;

pub use analytic::analytic_global_phase_covariance;
pub use basis::MeasurementBasis;
pub use covariance::{covariance_in_basis, covariance_with_global_phase, CovarianceMatrix};
pub use crystal::{Axis, CrystalSpec, Sellmeier};
pub use grid::SpectralGrid;
pub use jsa::{build_jsa, JointSpectralAmplitude, JsaKernel};
pub use pump::PumpSpec;
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use source::SourceConfig;
pub use symplectic::{omega, symplectic_from_unitary};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default first-mode squeezing, 0.45 dB: e^{-2r} = 10^{-0.045}.
pub const DEFAULT_R_SCALE: f64 = 0.45 * std::f64::consts::LN_10 / 20.0;
