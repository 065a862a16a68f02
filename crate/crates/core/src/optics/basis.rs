use nalgebra::DMatrix;
use num_complex::Complex64;

use super::schmidt::SchmidtDecomposition;
use crate::{Error, Result};

/// Overlap between the first n Schmidt modes (rows) and n rectangular
/// frexels partitioning [λ^c − S, λ^c + S] (columns). Rows have unit norm.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    u: DMatrix<Complex64>,
    window: Option<(f64, f64)>,
}

impl MeasurementBasis {
    /// Measures directly in the supermode basis.
    pub fn identity(n: usize) -> Self {
        Self { u: DMatrix::identity(n, n), window: None }
    }

    /// Arbitrary square matrix, rows = modes. No normalization is applied.
    pub fn from_matrix(u: DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != u.ncols() || u.nrows() == 0 {
            return Err(Error::Dimension(format!("basis matrix is {}x{}", u.nrows(), u.ncols())));
        }
        Ok(Self { u, window: None })
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &DMatrix<Complex64> {
        &self.u
    }

    /// `(center, half_span)` for frexel bases.
    pub fn window(&self) -> Option<(f64, f64)> {
        self.window
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.u.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.u.map(|z| z.re)
    }

    /// ‖U U† − I‖_F: zero for an exactly unitary overlap matrix.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n();
        (&self.u * self.u.adjoint() - DMatrix::<Complex64>::identity(n, n)).norm()
    }
}

/// Frexel index of `lambda` within [lo, lo + n·width].
fn frexel_of(lambda: f64, lo: f64, width: f64, n: usize) -> Option<usize> {
    let x = (lambda - lo) / (width * n as f64);
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    Some(((x * n as f64).floor() as usize).min(n - 1))
}

pub fn build_measurement_matrix(
    schmidt: &SchmidtDecomposition,
    n: usize,
    half_span: f64,
    center: f64,
) -> Result<MeasurementBasis> {
    if n == 0 || n > schmidt.n_kept() {
        return Err(Error::Dimension(format!(
            "{n} frexels requested but {} Schmidt modes kept",
            schmidt.n_kept()
        )));
    }
    if !(half_span > 0.0) {
        return Err(Error::InvalidParameter(format!("frexel half-span {half_span} must be > 0")));
    }
    let grid = schmidt.signal_grid();
    let (glo, ghi) = grid.cell_bounds();
    let slack = 1e-9 * grid.step();
    if center - half_span < glo - slack || center + half_span > ghi + slack {
        return Err(Error::InvalidParameter(format!(
            "frexel window [{:e}, {:e}] leaves the signal grid [{glo:e}, {ghi:e}]",
            center - half_span,
            center + half_span
        )));
    }
    let lo = center - half_span;
    let width = 2.0 * half_span / n as f64;
    let d = grid.step();
    let h = schmidt.modes_signal();
    let mut u = DMatrix::<Complex64>::zeros(n, n);
    for (a, &lambda) in grid.samples().iter().enumerate() {
        if let Some(j) = frexel_of(lambda, lo, width, n) {
            for i in 0..n {
                u[(i, j)] += h[(a, i)] * d;
            }
        }
    }
    let floor = 1e-12 * (2.0 * half_span).sqrt();
    for i in 0..n {
        let norm = u.row(i).norm();
        if !(norm > floor) {
            return Err(Error::Degenerate(format!(
                "Schmidt mode {} has no overlap with the frexel window",
                i + 1
            )));
        }
        u.row_mut(i).scale_mut(1.0 / norm);
    }
    Ok(MeasurementBasis { u, window: Some((center, half_span)) })
}

/// Smallest half-span around `center` holding `fraction` of the first `n`
/// modes' total norm, scanned on 300 equal steps up to the grid edge.
pub fn auto_half_span(schmidt: &SchmidtDecomposition, n: usize, center: f64, fraction: f64) -> Result<f64> {
    if n == 0 || n > schmidt.n_kept() {
        return Err(Error::Dimension(format!("{n} modes requested, {} kept", schmidt.n_kept())));
    }
    let grid = schmidt.signal_grid();
    let (glo, ghi) = grid.cell_bounds();
    let max_span = (center - glo).min(ghi - center);
    if !(max_span > 0.0) {
        return Err(Error::InvalidParameter("frexel center lies outside the grid".into()));
    }
    let d = grid.step();
    let h = schmidt.modes_signal();
    let weight: Vec<f64> = (0..grid.count())
        .map(|a| (0..n).map(|i| h[(a, i)].norm_sqr()).sum::<f64>() * d)
        .collect();
    let total: f64 = weight.iter().sum();
    const STEPS: usize = 300;
    for s in 1..=STEPS {
        let span = max_span * s as f64 / STEPS as f64;
        let inside: f64 = grid
            .samples()
            .iter()
            .zip(&weight)
            .filter(|(l, _)| (**l - center).abs() <= span)
            .map(|(_, w)| w)
            .sum();
        if inside >= fraction * total {
            return Ok(span);
        }
    }
    Ok(max_span)
}
