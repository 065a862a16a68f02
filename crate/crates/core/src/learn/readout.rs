use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

const CUTOFF: f64 = 1e-10;

/// y = wᵀO + b, optionally thresholded at 0.5.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearReadout {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub binary: bool,
}

impl LinearReadout {
    pub fn predict(&self, observables: &[f64]) -> f64 {
        self.weights.iter().zip(observables).map(|(w, o)| w * o).sum::<f64>() + self.bias
    }

    pub fn predict_rows(&self, o: &DMatrix<f64>) -> Vec<f64> {
        o.row_iter()
            .map(|r| self.weights.iter().zip(r.iter()).map(|(w, x)| w * x).sum::<f64>() + self.bias)
            .collect()
    }

    /// Raw output, or 0/1 after the 0.5 threshold for binary readouts.
    pub fn output(&self, observables: &[f64]) -> f64 {
        let y = self.predict(observables);
        if self.binary {
            threshold(y)
        } else {
            y
        }
    }

    pub fn as_binary(mut self) -> Self {
        self.binary = true;
        self
    }
}

pub fn threshold(y: f64) -> f64 {
    if y >= 0.5 {
        1.0
    } else {
        0.0
    }
}

/// Moore–Penrose inverse with singular values below CUTOFF·s_max dropped.
fn pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = a.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v requested"));
    let top = svd.singular_values.max();
    let inv = svd.singular_values.map(|s| if top > 0.0 && s > CUTOFF * top { 1.0 / s } else { 0.0 });
    vt.transpose() * DMatrix::from_diagonal(&inv) * u.transpose()
}

/// Least squares on [O | 1], one readout per target column. `lambda > 0`
/// adds a ridge penalty on the weights (the bias is not penalized).
pub fn train_readouts(o: &DMatrix<f64>, targets: &DMatrix<f64>, lambda: f64) -> Result<Vec<LinearReadout>> {
    let (rows, cols) = o.shape();
    if rows == 0 || rows != targets.nrows() {
        return Err(Error::Dimension(format!("{rows} observable rows for {} targets", targets.nrows())));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("regularization {lambda} must be >= 0")));
    }
    let mut a = DMatrix::from_element(rows, cols + 1, 1.0);
    a.view_mut((0, 0), (rows, cols)).copy_from(o);
    let x = if lambda == 0.0 {
        pinv(&a) * targets
    } else {
        let mut g = a.transpose() * &a;
        for k in 0..cols {
            g[(k, k)] += lambda;
        }
        pinv(&g) * (a.transpose() * targets)
    };
    Ok((0..targets.ncols())
        .map(|c| LinearReadout {
            weights: x.column(c).rows(0, cols).iter().copied().collect(),
            bias: x[(cols, c)],
            binary: false,
        })
        .collect())
}

pub fn train_readout(o: &DMatrix<f64>, targets: &[f64], lambda: f64) -> Result<LinearReadout> {
    let y = DMatrix::from_column_slice(targets.len(), 1, targets);
    Ok(train_readouts(o, &y, lambda)?.remove(0))
}

/// Mean squared training error of a readout.
pub fn training_mse(readout: &LinearReadout, o: &DMatrix<f64>, targets: &[f64]) -> f64 {
    let p = DVector::from_vec(readout.predict_rows(o));
    let t = DVector::from_column_slice(targets);
    (p - t).norm_squared() / targets.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn features() -> DMatrix<f64> {
        DMatrix::from_fn(20, 3, |i, j| ((i * (j + 3)) as f64 * 0.37).sin() + j as f64 * 0.1)
    }

    #[test]
    fn exact_linear_target() {
        let o = features();
        let y: Vec<f64> = (0..20).map(|i| 3.0 * o[(i, 0)] + 2.0).collect();
        let r = train_readout(&o, &y, 0.0).unwrap();
        assert!((r.weights[0] - 3.0).abs() < 1e-8);
        assert!(r.weights[1].abs() < 1e-8 && r.weights[2].abs() < 1e-8);
        assert!((r.bias - 2.0).abs() < 1e-8);
    }

    #[test]
    fn constant_target() {
        let r = train_readout(&features(), &[0.7; 20], 0.0).unwrap();
        assert!(r.weights.iter().all(|w| w.abs() < 1e-10));
        assert!((r.bias - 0.7).abs() < 1e-10);
    }

    #[test]
    fn hand_pseudoinverse() {
        // O = [[1],[2],[3],[4]], y = [1, 3, 2, 5]. With the bias column the
        // normal equations are [[30, 10], [10, 4]] x = [33, 11], so
        // x = (1/20)·[[4, −10], [−10, 30]]·[33, 11] = (1.1, 0).
        let o = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 4.0]);
        let r = train_readout(&o, &[1.0, 3.0, 2.0, 5.0], 0.0).unwrap();
        assert!((r.weights[0] - 1.1).abs() < 1e-12);
        assert!((r.bias - 0.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_columns_fall_back_to_min_norm() {
        let o = DMatrix::from_fn(10, 2, |i, _| i as f64);
        let y: Vec<f64> = (0..10).map(|i| 2.0 * i as f64).collect();
        let r = train_readout(&o, &y, 0.0).unwrap();
        assert!((r.weights[0] - 1.0).abs() < 1e-8 && (r.weights[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ridge_shrinks_weights() {
        let o = features();
        let y: Vec<f64> = (0..20).map(|i| o[(i, 1)] * 4.0).collect();
        let plain = train_readout(&o, &y, 0.0).unwrap();
        let ridge = train_readout(&o, &y, 10.0).unwrap();
        let n = |r: &LinearReadout| r.weights.iter().map(|w| w * w).sum::<f64>();
        assert!(n(&ridge) < n(&plain));
    }

    #[test]
    fn threshold_output() {
        let r = LinearReadout { weights: vec![1.0], bias: 0.0, binary: true };
        assert_eq!(r.output(&[0.49]), 0.0);
        assert_eq!(r.output(&[0.5]), 1.0);
    }

    #[test]
    fn shape_errors() {
        assert!(train_readout(&features(), &[1.0; 5], 0.0).is_err());
        assert!(train_readout(&features(), &[1.0; 20], -1.0).is_err());
    }
}
