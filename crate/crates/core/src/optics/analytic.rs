use nalgebra::DMatrix;
use num_complex::Complex64;

use super::covariance::CovarianceMatrix;
use crate::{Error, Result};

/// Closed-form covariance for a global pump phase δ and a real overlap matrix
/// U (rows = supermodes, columns = frexels):
///
/// σ_{l,j} = Σ_a U_{a,l} U_{a,j} [[e^{2r}cos²δ + e^{−2r}sin²δ, (e^{2r} − e^{−2r}) cosδ sinδ],
///                                [(e^{2r} − e^{−2r}) cosδ sinδ, e^{2r}sin²δ + e^{−2r}cos²δ]]
/// with r = r_a, placed in grouped [q…, p…] ordering.
pub fn analytic_global_phase_covariance(delta: f64, u: &DMatrix<Complex64>, r: &[f64]) -> Result<CovarianceMatrix> {
    let n = u.nrows();
    if u.ncols() != n || n == 0 {
        return Err(Error::Dimension(format!("U must be square, got {}x{}", u.nrows(), u.ncols())));
    }
    if r.len() < n {
        return Err(Error::Dimension(format!("{} squeezing values for {n} modes", r.len())));
    }
    if u.iter().any(|z| z.im.abs() > 1e-12) {
        return Err(Error::InvalidParameter("closed form requires a real overlap matrix".into()));
    }
    let (c, s) = (delta.cos(), delta.sin());
    let blocks: Vec<[f64; 3]> = r[..n]
        .iter()
        .map(|&ra| {
            let (e, f) = ((2.0 * ra).exp(), (-2.0 * ra).exp());
            [e + (f - e) * s * s, (e - f) * c * s, e + (f - e) * c * c]
        })
        .collect();
    let mut sigma = DMatrix::zeros(2 * n, 2 * n);
    for l in 0..n {
        for j in 0..n {
            let mut acc = [0.0; 3];
            for (a, b) in blocks.iter().enumerate() {
                let w = u[(a, l)].re * u[(a, j)].re;
                acc[0] += w * b[0];
                acc[1] += w * b[1];
                acc[2] += w * b[2];
            }
            sigma[(l, j)] = acc[0];
            sigma[(l, j + n)] = acc[1];
            sigma[(l + n, j)] = acc[1];
            sigma[(l + n, j + n)] = acc[2];
        }
    }
    CovarianceMatrix::from_matrix(sigma)
}
