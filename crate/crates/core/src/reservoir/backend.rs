use nalgebra::DMatrix;
use num_complex::Complex64;

use super::observables::{ObservableSelection, Scaler};
use crate::optics::basis::build_measurement_matrix;
use crate::optics::covariance::covariance_from_squeezing;
use crate::optics::source::Source;
use crate::optics::{analytic_global_phase_covariance, covariance_in_basis, CovarianceMatrix, JsaKernel, MeasurementBasis};
use crate::optics::schmidt_decompose;
use crate::{Error, Result};

/// Full JSA → SVD → frexel-basis pipeline for a segmented pump.
#[derive(Debug, Clone)]
pub struct SegmentedPipeline {
    pub kernel: JsaKernel,
    pub n: usize,
    pub n_kept: usize,
    pub r_scale: f64,
    pub center: f64,
    pub half_span: f64,
}

impl SegmentedPipeline {
    pub fn from_source(source: &Source, n: usize) -> Result<Self> {
        let (center, half_span) = source.frexel_window(n)?;
        Ok(Self {
            kernel: source.kernel.clone(),
            n,
            n_kept: source.config.n_kept(n),
            r_scale: source.config.r_scale,
            center,
            half_span,
        })
    }

    pub fn covariance(&self, phases: &[f64]) -> Result<CovarianceMatrix> {
        let jsa = self.kernel.assemble(phases)?;
        let schmidt = schmidt_decompose(&jsa, self.n_kept, self.r_scale)?;
        let basis = build_measurement_matrix(&schmidt, self.n, self.half_span, self.center)?;
        covariance_in_basis(&schmidt, &basis)
    }
}

/// Covariance producer for one reservoir.
#[derive(Debug, Clone)]
pub enum Backend {
    /// Closed-form global-phase covariance; one phase, real U.
    Analytic { u: DMatrix<Complex64>, r: Vec<f64> },
    /// Full pipeline for a single segment: the supermode covariance rotated
    /// by the global phase, then transformed by S_U.
    GlobalPhase { basis: MeasurementBasis, r: Vec<f64> },
    /// Full pipeline with N phase segments.
    Segmented(Box<SegmentedPipeline>),
}

impl Backend {
    /// Single mode measured in its own supermode basis, squeezing `r`.
    pub fn single_mode(r: f64) -> Self {
        Backend::Analytic { u: DMatrix::identity(1, 1), r: vec![r] }
    }

    pub fn analytic(u: DMatrix<Complex64>, r: Vec<f64>) -> Result<Self> {
        if u.iter().any(|z| z.im.abs() > 1e-12) {
            return Err(Error::InvalidParameter("analytic backend requires a real overlap matrix".into()));
        }
        if u.nrows() != u.ncols() || r.len() < u.nrows() {
            return Err(Error::Dimension("overlap matrix and squeezing list disagree".into()));
        }
        Ok(Backend::Analytic { u, r })
    }

    /// Global-phase full pipeline from a source, n frexels.
    pub fn global_phase(source: &Source, n: usize) -> Result<Self> {
        if source.segments() != 1 {
            return Err(Error::InvalidParameter("global-phase backend needs a single pump segment".into()));
        }
        let schmidt = source.schmidt(&[0.0], source.config.n_kept(n))?;
        let basis = source.basis(&schmidt, n)?;
        Ok(Backend::GlobalPhase { basis, r: schmidt.r()[..n].to_vec() })
    }

    /// Analytic backend with the same overlap matrix as [`Backend::global_phase`].
    pub fn analytic_from_source(source: &Source, n: usize) -> Result<Self> {
        match Self::global_phase(source, n)? {
            Backend::GlobalPhase { basis, r } => Self::analytic(basis.real_part().map(|x| Complex64::new(x, 0.0)), r),
            _ => unreachable!(),
        }
    }

    pub fn segmented(source: &Source, n: usize) -> Result<Self> {
        Ok(Backend::Segmented(Box::new(SegmentedPipeline::from_source(source, n)?)))
    }

    pub fn segments(&self) -> usize {
        match self {
            Backend::Analytic { .. } | Backend::GlobalPhase { .. } => 1,
            Backend::Segmented(p) => p.kernel.segments(),
        }
    }

    pub fn n_modes(&self) -> usize {
        match self {
            Backend::Analytic { u, .. } => u.nrows(),
            Backend::GlobalPhase { basis, .. } => basis.n(),
            Backend::Segmented(p) => p.n,
        }
    }

    pub fn covariance(&self, phases: &[f64]) -> Result<CovarianceMatrix> {
        if phases.len() != self.segments() {
            return Err(Error::Dimension(format!(
                "{} phases for a backend with {} segments",
                phases.len(),
                self.segments()
            )));
        }
        match self {
            Backend::Analytic { u, r } => analytic_global_phase_covariance(phases[0], u, r),
            Backend::GlobalPhase { basis, r } => covariance_from_squeezing(r, basis, phases[0]),
            Backend::Segmented(p) => p.covariance(phases),
        }
    }

    /// Exact min-max extremes when they exist (single phase), otherwise `None`.
    pub fn analytic_scaler(&self, sel: &ObservableSelection) -> Option<Result<Scaler>> {
        match self {
            Backend::Segmented(_) => None,
            _ => Some(Scaler::from_harmonic(|d| sel.extract(&self.covariance(&[d])?), sel)),
        }
    }
}
