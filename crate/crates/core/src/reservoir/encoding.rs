use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Electro-optic half-wave scale: V_{π/2} = 0.075 V.
pub const V_HALF_PI: f64 = 0.075;

/// How a drive value (volts, seconds or radians) becomes a pump phase.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseMap {
    /// δ = π/2 · V / V_{π/2} + offset.
    Voltage { v_half_pi: f64, offset: f64 },
    /// δ_i = ω_i · τ + offset: the drive is a delay τ applied to segment i
    /// whose centre angular frequency is ω_i.
    Delay { omega: Vec<f64>, offset: f64 },
    /// δ = drive + offset.
    Radians { offset: f64 },
}

impl PhaseMap {
    pub fn phase(&self, segment: usize, drive: f64) -> f64 {
        match self {
            PhaseMap::Voltage { v_half_pi, offset } => phase_from_voltage(drive, *v_half_pi, *offset),
            PhaseMap::Delay { omega, offset } => omega[segment] * drive + offset,
            PhaseMap::Radians { offset } => drive + offset,
        }
    }
}

pub fn phase_from_voltage(v: f64, v_half_pi: f64, offset: f64) -> f64 {
    FRAC_PI_2 * v / v_half_pi + offset
}

/// α, β and the feedback mask for N phase-controlled segments, all in drive units.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingParams {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// N rows; one column per feedback tap.
    pub mask: DMatrix<f64>,
    pub map: PhaseMap,
}

impl EncodingParams {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, mask: DMatrix<f64>, map: PhaseMap) -> Result<Self> {
        let p = Self { alpha, beta, mask, map };
        p.validate()?;
        Ok(p)
    }

    pub fn segments(&self) -> usize {
        self.alpha.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.alpha.len();
        if n == 0 {
            return Err(Error::InvalidParameter("encoding needs at least one segment".into()));
        }
        if self.beta.len() != n || self.mask.nrows() != n {
            return Err(Error::Dimension(format!(
                "alpha has {n} entries, beta {}, mask {} rows",
                self.beta.len(),
                self.mask.nrows()
            )));
        }
        match &self.map {
            PhaseMap::Voltage { v_half_pi, .. } if !(*v_half_pi > 0.0) => {
                Err(Error::InvalidParameter(format!("v_half_pi {v_half_pi} must be > 0")))
            }
            PhaseMap::Delay { omega, .. } if omega.len() != n => {
                Err(Error::Dimension(format!("{} segment frequencies for {n} segments", omega.len())))
            }
            _ => Ok(()),
        }
    }
}

/// δ_i = map(α_i s_{i mod dim} + β_i + Σ_m M_{im} f_m).
pub fn encode_phases(input: &[f64], feedback: &[f64], params: &EncodingParams) -> Result<Vec<f64>> {
    let n = params.segments();
    if input.is_empty() || input.len() > n {
        return Err(Error::Dimension(format!("input of dimension {} for {n} segments", input.len())));
    }
    if feedback.len() != params.mask.ncols() {
        return Err(Error::Dimension(format!(
            "{} feedback values for a mask with {} columns",
            feedback.len(),
            params.mask.ncols()
        )));
    }
    Ok((0..n)
        .map(|i| {
            let fb: f64 = params.mask.row(i).iter().zip(feedback).map(|(m, o)| m * o).sum();
            let drive = params.alpha[i] * input[i % input.len()] + params.beta[i] + fb;
            params.map.phase(i, drive)
        })
        .collect())
}
