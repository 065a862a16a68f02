use nalgebra::{DMatrix, SymmetricEigen};

use super::basis::MeasurementBasis;
use super::schmidt::SchmidtDecomposition;
use super::symplectic::{omega, symplectic_from_unitary};
use crate::{Error, Result};

/// 2n×2n quadrature covariance, grouped [q₁…q_n, p₁…p_n], vacuum variance 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let (r, c) = entries.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::Dimension(format!("covariance must be 2n x 2n, got {r}x{c}")));
        }
        Ok(Self { entries })
    }

    pub fn vacuum(n: usize) -> Self {
        Self { entries: DMatrix::identity(2 * n, 2 * n) }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (&self.entries - self.entries.transpose()).amax() <= tol
    }

    pub fn is_positive_definite(&self) -> bool {
        self.entries.clone().cholesky().is_some()
    }

    /// Variance of q_i cos θ + p_i sin θ.
    pub fn rotated_variance(&self, mode: usize, theta: f64) -> f64 {
        let (q, p) = (mode, mode + self.n());
        let (c, s) = (theta.cos(), theta.sin());
        c * c * self.get(q, q) + s * s * self.get(p, p) + 2.0 * c * s * self.get(q, p)
    }

    /// Williamson spectrum ν₁ ≤ … ≤ ν_n, from the eigenvalues of
    /// σ^{1/2} Ωᵀ σ Ω σ^{1/2} (each ν² appears twice).
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let sym = 0.5 * (&self.entries + self.entries.transpose());
        let eig = SymmetricEigen::new(sym.clone());
        if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Domain("covariance is not positive definite".into()));
        }
        let sqrt = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
            * eig.eigenvectors.transpose();
        let om = omega(self.n());
        let m = &sqrt * om.transpose() * &sym * &om * &sqrt;
        let m = 0.5 * (&m + m.transpose());
        let mut nu2: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        nu2.sort_by(f64::total_cmp);
        Ok(nu2.chunks(2).map(|p| (0.5 * (p[0] + p[1])).max(0.0).sqrt()).collect())
    }
}

/// diag(e^{2r}, e^{−2r}) in grouped ordering, rotated by `delta` in every
/// mode's phase space: D' = S_rotᵀ D S_rot with S_rot = [[cI, sI], [−sI, cI]].
pub fn supermode_covariance(r: &[f64], delta: f64) -> DMatrix<f64> {
    let n = r.len();
    let (c, s) = (delta.cos(), delta.sin());
    let mut d = DMatrix::zeros(2 * n, 2 * n);
    for (a, &ra) in r.iter().enumerate() {
        let (e, f) = ((2.0 * ra).exp(), (-2.0 * ra).exp());
        d[(a, a)] = e * c * c + f * s * s;
        d[(a + n, a + n)] = e * s * s + f * c * c;
        let x = (e - f) * c * s;
        d[(a, a + n)] = x;
        d[(a + n, a)] = x;
    }
    d
}

fn congruence(r: &[f64], basis: &MeasurementBasis, delta: f64) -> Result<CovarianceMatrix> {
    let n = basis.n();
    if r.len() < n {
        return Err(Error::Dimension(format!("basis has {n} modes but only {} squeezing values", r.len())));
    }
    let s = symplectic_from_unitary(basis.u());
    let d = supermode_covariance(&r[..n], delta);
    let sigma = s.transpose() * d * &s;
    CovarianceMatrix::from_matrix(0.5 * (&sigma + sigma.transpose()))
}

/// σ' = S_Uᵀ diag(e^{2r₁}…, e^{−2r₁}…) S_U.
pub fn covariance_in_basis(schmidt: &SchmidtDecomposition, basis: &MeasurementBasis) -> Result<CovarianceMatrix> {
    congruence(schmidt.r(), basis, 0.0)
}

/// Same as [`covariance_in_basis`] after a global pump phase `delta`, which
/// rotates every supermode's squeezing ellipse by `delta`.
pub fn covariance_with_global_phase(
    schmidt: &SchmidtDecomposition,
    basis: &MeasurementBasis,
    delta: f64,
) -> Result<CovarianceMatrix> {
    congruence(schmidt.r(), basis, delta)
}

/// Congruence from explicit squeezing values, for backends that already hold r.
pub fn covariance_from_squeezing(r: &[f64], basis: &MeasurementBasis, delta: f64) -> Result<CovarianceMatrix> {
    congruence(r, basis, delta)
}
