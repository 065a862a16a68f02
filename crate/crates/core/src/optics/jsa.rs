use nalgebra::DMatrix;
use num_complex::Complex64;

use super::crystal::CrystalSpec;
use super::grid::SpectralGrid;
use super::pump::{segment_index, PumpSpec};
use crate::{Error, Result};

/// Joint spectral amplitude on a signal × idler grid, unit Frobenius norm.
#[derive(Debug, Clone)]
pub struct JointSpectralAmplitude {
    values: DMatrix<Complex64>,
    signal: SpectralGrid,
    idler: SpectralGrid,
}

impl JointSpectralAmplitude {
    /// Wraps raw values and normalizes them.
    pub fn from_values(values: DMatrix<Complex64>, signal: SpectralGrid, idler: SpectralGrid) -> Result<Self> {
        if values.nrows() != signal.count() || values.ncols() != idler.count() {
            return Err(Error::Dimension(format!(
                "JSA is {}x{} but grids are {}x{}",
                values.nrows(),
                values.ncols(),
                signal.count(),
                idler.count()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("JSA has non-finite entries".into()));
        }
        let norm = values.norm();
        if !(norm > 0.0) {
            return Err(Error::Degenerate(
                "JSA is identically zero: pump support misses the grid's energy-conservation band".into(),
            ));
        }
        Ok(Self { values: values / Complex64::new(norm, 0.0), signal, idler })
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub fn signal(&self) -> &SpectralGrid {
        &self.signal
    }

    pub fn idler(&self) -> &SpectralGrid {
        &self.idler
    }

    pub fn magnitude(&self) -> DMatrix<f64> {
        self.values.map(|z| z.norm())
    }
}

/// Phase-independent part of the JSA: envelope × phase matching, plus the pump
/// segment hit by every grid cell. Re-assembling for new segment phases costs
/// one pass over the grid.
#[derive(Debug, Clone)]
pub struct JsaKernel {
    weight: DMatrix<f64>,
    segment: DMatrix<u32>,
    segments: usize,
    signal: SpectralGrid,
    idler: SpectralGrid,
}

const OUTSIDE: u32 = u32::MAX;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl JsaKernel {
    /// Sinc phase matching sinc(L·Δk/2) from the crystal.
    pub fn new(pump: &PumpSpec, crystal: &CrystalSpec, signal: &SpectralGrid, idler: &SpectralGrid) -> Result<Self> {
        let half_l = 0.5 * crystal.length;
        Self::with_phase_matching(pump, signal, idler, |ls, li| {
            Ok(sinc(half_l * crystal.phase_mismatch(ls, li)?))
        })
    }

    /// Arbitrary real phase-matching function φ(λ_S, λ_I).
    pub fn with_phase_matching<F>(pump: &PumpSpec, signal: &SpectralGrid, idler: &SpectralGrid, phi: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64>,
    {
        let (ns, ni) = (signal.count(), idler.count());
        let mut weight = DMatrix::zeros(ns, ni);
        let mut segment = DMatrix::from_element(ns, ni, OUTSIDE);
        for (a, &ls) in signal.samples().iter().enumerate() {
            for (b, &li) in idler.samples().iter().enumerate() {
                let lp = 1.0 / (1.0 / ls + 1.0 / li);
                if let Some(seg) = segment_index(pump.center, pump.width, pump.segments(), lp) {
                    weight[(a, b)] = pump.envelope(lp) * phi(ls, li)?;
                    segment[(a, b)] = seg as u32;
                }
            }
        }
        Ok(Self { weight, segment, segments: pump.segments(), signal: signal.clone(), idler: idler.clone() })
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn signal(&self) -> &SpectralGrid {
        &self.signal
    }

    pub fn assemble(&self, phases: &[f64]) -> Result<JointSpectralAmplitude> {
        if phases.len() != self.segments {
            return Err(Error::Dimension(format!(
                "{} phases for {} pump segments",
                phases.len(),
                self.segments
            )));
        }
        let rot: Vec<Complex64> = phases.iter().map(|&d| Complex64::from_polar(1.0, d)).collect();
        let values = DMatrix::from_fn(self.weight.nrows(), self.weight.ncols(), |a, b| {
            match self.segment[(a, b)] {
                OUTSIDE => Complex64::new(0.0, 0.0),
                s => rot[s as usize] * self.weight[(a, b)],
            }
        });
        JointSpectralAmplitude::from_values(values, self.signal.clone(), self.idler.clone())
    }
}

/// J[a,b] = p(λ_P)·sinc(L·Δk/2), normalized to unit Frobenius norm.
pub fn build_jsa(
    pump: &PumpSpec,
    crystal: &CrystalSpec,
    signal: &SpectralGrid,
    idler: &SpectralGrid,
) -> Result<JointSpectralAmplitude> {
    JsaKernel::new(pump, crystal, signal, idler)?.assemble(&pump.phases)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpectralGrid {
        SpectralGrid::centered(1560e-9, 20e-9, 64).unwrap()
    }

    #[test]
    fn pump_off_grid_is_an_error() {
        let pump = PumpSpec::new(700e-9, 1e-9, vec![0.0]).unwrap();
        let crystal = CrystalSpec::toy(2.0, 1e-2);
        let err = build_jsa(&pump, &crystal, &grid(), &grid()).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn unit_frobenius_norm() {
        let pump = PumpSpec::new(780e-9, 1e-9, vec![0.3]).unwrap();
        let j = build_jsa(&pump, &CrystalSpec::toy(2.0, 1e-2), &grid(), &grid()).unwrap();
        assert!((j.values().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_pump_fills_one_antidiagonal_band() {
        // Pump support (0.1 nm) narrower than the λ_P step between adjacent
        // cells (0.125 nm): only the a + b = 40 cells survive when φ ≡ 1.
        let g = SpectralGrid::new(1550e-9, 1570e-9, 41).unwrap();
        let pump = PumpSpec::new(780e-9, 0.1e-9 / 6.0, vec![0.0]).unwrap();
        let k = JsaKernel::with_phase_matching(&pump, &g, &g, |_, _| Ok(1.0)).unwrap();
        let j = k.assemble(&[0.0]).unwrap();
        let mut cells = Vec::new();
        for a in 0..41 {
            for b in 0..41 {
                if j.values()[(a, b)].norm() > 0.0 {
                    cells.push(a + b);
                }
            }
        }
        assert_eq!(cells, vec![40; 41]);
    }

    #[test]
    fn zero_outside_pump_band() {
        let g = grid();
        let pump = PumpSpec::new(780e-9, 0.5e-9, vec![0.0, 1.0]).unwrap();
        let j = build_jsa(&pump, &CrystalSpec::toy(2.0, 1e-2), &g, &g).unwrap();
        for (a, &ls) in g.samples().iter().enumerate() {
            for (b, &li) in g.samples().iter().enumerate() {
                let lp = 1.0 / (1.0 / ls + 1.0 / li);
                if (lp - 780e-9).abs() > 1.5e-9 {
                    assert_eq!(j.values()[(a, b)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn phase_count_checked() {
        let pump = PumpSpec::new(780e-9, 1e-9, vec![0.0, 0.0]).unwrap();
        let k = JsaKernel::new(&pump, &CrystalSpec::toy(2.0, 1e-2), &grid(), &grid()).unwrap();
        assert!(matches!(k.assemble(&[0.0]), Err(Error::Dimension(_))));
    }
}
