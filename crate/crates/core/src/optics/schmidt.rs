use faer::Mat;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::grid::SpectralGrid;
use super::jsa::JointSpectralAmplitude;
use crate::{Error, Result};

const RANK_TOL: f64 = 1e-12;

/// Squeezed supermodes of a JSA.
///
/// `modes_signal` holds h_k as columns, unit norm under the midpoint rule on
/// the signal grid. `coefficients` are all singular values of the
/// unit-norm JSA (Σ r̃² = 1); `r` are the first `n_kept` of them rescaled so
/// that r₁ = r_scale.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    coefficients: Vec<f64>,
    r: Vec<f64>,
    modes_signal: DMatrix<Complex64>,
    modes_idler: DMatrix<Complex64>,
    signal: SpectralGrid,
    idler: SpectralGrid,
}

fn fix_phase(col: &mut [Complex64]) -> Complex64 {
    let mut best = 0;
    for (i, z) in col.iter().enumerate() {
        if z.norm_sqr() > col[best].norm_sqr() {
            best = i;
        }
    }
    let m = col[best];
    let c = if m.norm() > 0.0 { m.conj() / m.norm() } else { Complex64::new(1.0, 0.0) };
    for z in col.iter_mut() {
        *z *= c;
    }
    c
}

pub fn schmidt_decompose(jsa: &JointSpectralAmplitude, n_kept: usize, r_scale: f64) -> Result<SchmidtDecomposition> {
    let j = jsa.values();
    let (ns, ni) = (j.nrows(), j.ncols());
    if n_kept == 0 || n_kept > ns.min(ni) {
        return Err(Error::InvalidParameter(format!(
            "n_kept = {n_kept} must lie in 1..={}",
            ns.min(ni)
        )));
    }
    if !(r_scale > 0.0) {
        return Err(Error::InvalidParameter(format!("r_scale {r_scale} must be > 0")));
    }
    let m = Mat::<faer::c64>::from_fn(ns, ni, |a, b| j[(a, b)]);
    let svd = m.thin_svd().map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let s = svd.S().column_vector();
    let (u, v) = (svd.U(), svd.V());
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&x, &y| s[y].re.total_cmp(&s[x].re));
    let coefficients: Vec<f64> = order.iter().map(|&k| s[k].re.max(0.0)).collect();
    let rank = coefficients.iter().filter(|&&c| c > RANK_TOL * coefficients[0]).count();
    if n_kept > rank {
        return Err(Error::RankDeficient { requested: n_kept, rank });
    }

    let (ds, di) = (jsa.signal().step(), jsa.idler().step());
    let mut modes_signal = DMatrix::zeros(ns, n_kept);
    let mut modes_idler = DMatrix::zeros(ni, n_kept);
    let mut col_u = vec![Complex64::new(0.0, 0.0); ns];
    for (k, &src) in order.iter().take(n_kept).enumerate() {
        for a in 0..ns {
            col_u[a] = u[(a, src)];
        }
        let c = fix_phase(&mut col_u);
        let hs = 1.0 / ds.sqrt();
        for a in 0..ns {
            modes_signal[(a, k)] = col_u[a] * hs;
        }
        // J = Σ s u v†, so g = conj(v·c) keeps u·c ⊗ g unchanged.
        let hi = 1.0 / di.sqrt();
        for b in 0..ni {
            modes_idler[(b, k)] = (v[(b, src)] * c).conj() * hi;
        }
    }
    let r = coefficients[..n_kept].iter().map(|c| r_scale * c / coefficients[0]).collect();
    Ok(SchmidtDecomposition {
        coefficients,
        r,
        modes_signal,
        modes_idler,
        signal: jsa.signal().clone(),
        idler: jsa.idler().clone(),
    })
}

impl SchmidtDecomposition {
    /// Builds a decomposition from explicit signal modes (columns), used when
    /// the supermodes are known in closed form. Idler modes mirror the signal.
    pub fn from_modes(r: Vec<f64>, modes: DMatrix<Complex64>, grid: SpectralGrid) -> Result<Self> {
        if modes.nrows() != grid.count() || modes.ncols() != r.len() || r.is_empty() {
            return Err(Error::Dimension(format!(
                "{} squeezing values, modes {}x{}, grid {}",
                r.len(),
                modes.nrows(),
                modes.ncols(),
                grid.count()
            )));
        }
        if r.iter().any(|&x| !(x >= 0.0)) || r.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter("squeezing values must be nonnegative and descending".into()));
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let coefficients = r.iter().map(|x| if norm > 0.0 { x / norm } else { 0.0 }).collect();
        Ok(Self {
            coefficients,
            r,
            modes_idler: modes.clone(),
            modes_signal: modes,
            signal: grid.clone(),
            idler: grid,
        })
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn n_kept(&self) -> usize {
        self.r.len()
    }

    /// Singular values of the unit-norm JSA, descending.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn modes_signal(&self) -> &DMatrix<Complex64> {
        &self.modes_signal
    }

    pub fn modes_idler(&self) -> &DMatrix<Complex64> {
        &self.modes_idler
    }

    pub fn signal_grid(&self) -> &SpectralGrid {
        &self.signal
    }

    pub fn idler_grid(&self) -> &SpectralGrid {
        &self.idler
    }

    /// Number of singular values with r̃_k / r̃₁ above `threshold`.
    pub fn modes_above(&self, threshold: f64) -> usize {
        let top = self.coefficients[0];
        self.coefficients.iter().filter(|&&c| c > threshold * top).count()
    }

    /// Midpoint-rule inner product ⟨h_i, h_j⟩ on the signal grid.
    pub fn overlap(&self, i: usize, j: usize) -> Complex64 {
        let d = self.signal.step();
        self.modes_signal
            .column(i)
            .iter()
            .zip(self.modes_signal.column(j).iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::new(-10.0, 10.0, n).unwrap()
    }

    fn double_gaussian(a: f64, b: f64, n: usize) -> JointSpectralAmplitude {
        let g = SpectralGrid::new(-4.0 * b, 4.0 * b, n).unwrap();
        let x = g.samples().to_vec();
        let v = DMatrix::from_fn(n, n, |i, j| {
            let (s, d) = (x[i] + x[j], x[i] - x[j]);
            Complex64::new((-s * s / (2.0 * a * a) - d * d / (2.0 * b * b)).exp(), 0.0)
        });
        JointSpectralAmplitude::from_values(v, g.clone(), g).unwrap()
    }

    #[test]
    fn separable_kernel_has_rank_one() {
        let g = grid(40);
        let x = g.samples().to_vec();
        let v = DMatrix::from_fn(40, 40, |i, j| Complex64::new((-x[i] * x[i]).exp(), 0.0) * (1.0 + 0.1 * x[j] * x[j]).recip());
        let jsa = JointSpectralAmplitude::from_values(v, g.clone(), g).unwrap();
        let s = schmidt_decompose(&jsa, 1, 0.1).unwrap();
        assert_eq!(s.r(), &[0.1]);
        assert!(s.coefficients()[1] < 1e-12);
        assert!(matches!(schmidt_decompose(&jsa, 2, 0.1), Err(Error::RankDeficient { rank: 1, .. })));
    }

    #[test]
    fn double_gaussian_is_geometric() {
        // Mehler kernel: r̃_{k+1}/r̃_k = (b − a)/(b + a).
        for (a, b) in [(1.0, 3.0), (1.0, 5.0)] {
            let s = schmidt_decompose(&double_gaussian(a, b, 300), 8, 1.0).unwrap();
            let mu = (b - a) / (b + a);
            for w in s.coefficients()[..8].windows(2) {
                assert!((w[1] / w[0] - mu).abs() < 1e-9, "{} vs {mu}", w[1] / w[0]);
            }
        }
    }

    #[test]
    fn spectrum_and_modes_normalized() {
        let s = schmidt_decompose(&double_gaussian(1.0, 3.0, 120), 6, 0.05).unwrap();
        let total: f64 = s.coefficients().iter().map(|c| c * c).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((s.r()[0] - 0.05).abs() < 1e-15);
        assert!(s.r().windows(2).all(|w| w[1] <= w[0]));
        for i in 0..6 {
            for j in 0..6 {
                let o = s.overlap(i, j).norm();
                if i == j {
                    assert!((o - 1.0).abs() < 1e-10);
                } else {
                    assert!(o < 1e-8);
                }
            }
        }
    }

    #[test]
    fn largest_entry_is_real_positive() {
        let s = schmidt_decompose(&double_gaussian(1.0, 3.0, 80), 4, 0.05).unwrap();
        for k in 0..4 {
            let col = s.modes_signal().column(k);
            let m = col.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
            assert!(m.re > 0.0 && m.im.abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruction() {
        let jsa = double_gaussian(1.0, 2.0, 60);
        let s = schmidt_decompose(&jsa, 20, 1.0).unwrap();
        let d = jsa.signal().step();
        let mut rec = DMatrix::<Complex64>::zeros(60, 60);
        for k in 0..20 {
            let c = s.coefficients()[k] * d;
            rec += s.modes_signal().column(k) * s.modes_idler().column(k).transpose() * Complex64::new(c, 0.0);
        }
        assert!((rec - jsa.values()).norm() < 1e-6);
    }
}
